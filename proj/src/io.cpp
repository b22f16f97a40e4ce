#include "dyson/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "dyson/error.hpp"

namespace dyson::io {

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_density_csv(const fs::path& path, const GridDensity& p) {
    auto out = open_out(path);
    const GridSpec& g = p.grid();
    out << "s,p\n";
    for (int i = 0; i <= g.n; ++i) out << fmt(g.node(i)) << ',' << fmt(p.value(i)) << '\n';
}

Json density_json(const GridDensity& p) {
    Json j;
    j["L"] = p.grid().half_width;
    j["N"] = p.grid().n;
    // Log values keep tails that underflow as plain doubles.
    std::vector<Json> lv;
    for (double x : p.log_values()) lv.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
    j["log_values"] = lv;
    return j;
}

GridDensity density_from_json(const Json& j) {
    try {
        GridSpec g{j.at("L").get<double>(), j.at("N").get<int>()};
        if (j.contains("values")) {
            return GridDensity::from_values(g, j.at("values").get<std::vector<double>>(), false);
        }
        std::vector<double> lv;
        for (const Json& x : j.at("log_values")) {
            lv.push_back(x.is_null() ? -std::numeric_limits<double>::infinity() : x.get<double>());
        }
        return GridDensity::from_log(g, std::move(lv), false);
    } catch (const Json::exception& e) {
        throw IoError(std::string("malformed density JSON: ") + e.what());
    }
}

void write_flow_csv(const fs::path& path, const FlowTrace& trace) {
    auto out = open_out(path);
    out << "m,variance,kurtosis,l1_to_fp,classification\n";
    for (const auto& s : trace.iterates) {
        out << s.m << ',' << fmt(s.variance) << ',' << fmt(s.kurtosis) << ',' << fmt(s.l1_to_fp)
            << ',' << to_string(s.classification) << '\n';
    }
}

Json spectrum_json(const Spectrum& s) {
    Json j;
    j["eigenvalues"] = s.eigenvalues;
    j["residuals"] = s.residuals;
    j["imag_parts"] = s.imag_parts;
    return j;
}

void write_eigenfunction_csv(const fs::path& path, const GridSpec& grid,
                             const std::vector<double>& e) {
    auto out = open_out(path);
    out << "s,e\n";
    for (int i = 0; i <= grid.n; ++i) out << fmt(grid.node(i)) << ',' << fmt(e[i]) << '\n';
}

Json fixed_point_json(const FixedPointResult& r, const std::string& density_file) {
    Json j;
    j["density_file"] = density_file;
    j["residual"] = r.residual_l1;
    j["c"] = r.c;
    j["status"] = r.status == SolveStatus::Converged ? "converged" : "stalled";
    Json trace = Json::array();
    for (const auto& t : r.newton_trace) {
        trace.push_back({{"step", t.step}, {"residual", t.residual}, {"damping", t.damping}});
    }
    j["trace"] = trace;
    return j;
}

void write_tau_csv(const fs::path& path, const std::vector<CurvePoint>& points) {
    auto out = open_out(path);
    out << "t,tau\n";
    for (const auto& p : points) out << fmt(p.t) << ',' << fmt(p.tau) << '\n';
}

void write_magnetization_csv(const fs::path& path, const std::vector<CurvePoint>& points) {
    auto out = open_out(path);
    out << "t,M,tau\n";
    for (const auto& p : points) out << fmt(p.t) << ',' << fmt(p.m) << ',' << fmt(p.tau) << '\n';
}

void write_json(const fs::path& path, const Json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace dyson::io
