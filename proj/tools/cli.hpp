#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dyson::cli {

enum ExitCode : int {
    kOk = 0,
    kMismatch = 1,
    kNoConvergence = 2,
    kBadConfig = 64,
    kMissingInput = 66,
};

struct Config {
    std::string command;
    double a = 1.25;
    double grid_l = 10.0;
    int grid_n = 2048;
    int threads = 0;  // 0: hardware concurrency
    std::string output_dir = "out";

    struct {
        bool non_gaussian = false;
    } fixed_point;
    struct {
        int k = 5;
        std::string at = "gaussian";
        std::string fixed_point_file;  // default <output_dir>/fixed_point.json
    } spectrum;
    struct {
        int m_max = 60;
        double t = 0.0;
        double variance = 0.0;  // Gaussian start when positive
    } flow;
    struct {
        int m_max = 600;
        double tol_rel = 1e-12;  // final bracket width over the family range
    } critical;
    struct {
        std::string side = "high";
        int n = 256;
        int points = 8;
        std::vector<double> t_values;
        std::optional<double> t_c;
        bool high_t_above = false;  // used with t_c
    } observables;
    struct {
        int n = 3;
        double beta = 0.7;
    } oracle;
};

nlohmann::ordered_json to_json(const Config& c);
// Overlays the keys present in j onto c. Throws std::invalid_argument on bad types.
void merge_json(Config& c, const nlohmann::ordered_json& j);
// Empty when valid.
std::string validate(const Config& c);

int run(int argc, char** argv);

}  // namespace dyson::cli
