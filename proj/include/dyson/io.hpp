#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyson/critparam.hpp"
#include "dyson/density.hpp"
#include "dyson/fixedpoint.hpp"
#include "dyson/rgflow.hpp"
#include "dyson/spectral.hpp"

namespace dyson::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Shortest text that reads back to the same double (%.17g).
std::string fmt(double x);

// `s,p`
void write_density_csv(const fs::path& path, const GridDensity& p);
// {L, N, log_values}; null for a zero value
Json density_json(const GridDensity& p);
GridDensity density_from_json(const Json& j);

// `m,variance,kurtosis,l1_to_fp,classification`
void write_flow_csv(const fs::path& path, const FlowTrace& trace);

// {eigenvalues, residuals}
Json spectrum_json(const Spectrum& s);
// `s,e`
void write_eigenfunction_csv(const fs::path& path, const GridSpec& grid,
                             const std::vector<double>& e);

Json fixed_point_json(const FixedPointResult& r, const std::string& density_file);

// `t,tau`
void write_tau_csv(const fs::path& path, const std::vector<CurvePoint>& points);
// `t,M,tau`
void write_magnetization_csv(const fs::path& path, const std::vector<CurvePoint>& points);

void write_json(const fs::path& path, const Json& j);
Json read_json(const fs::path& path);

}  // namespace dyson::io
