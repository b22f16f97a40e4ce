#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <thread>

#include "dyson/critparam.hpp"
#include "dyson/error.hpp"
#include "dyson/fixedpoint.hpp"
#include "dyson/io.hpp"
#include "dyson/model.hpp"
#include "dyson/parallel.hpp"
#include "dyson/rgflow.hpp"
#include "dyson/spectral.hpp"

namespace dyson::cli {

using io::Json;
namespace fs = std::filesystem;

Json to_json(const Config& c) {
    Json j;
    j["a"] = c.a;
    j["grid"] = {{"L", c.grid_l}, {"N", c.grid_n}};
    j["threads"] = c.threads;
    j["output_dir"] = c.output_dir;
    j["fixed_point"] = {{"non_gaussian", c.fixed_point.non_gaussian}};
    j["spectrum"] = {{"k", c.spectrum.k},
                     {"at", c.spectrum.at},
                     {"fixed_point_file", c.spectrum.fixed_point_file}};
    j["flow"] = {{"m_max", c.flow.m_max}, {"t", c.flow.t}, {"variance", c.flow.variance}};
    j["critical"] = {{"m_max", c.critical.m_max}, {"tol_rel", c.critical.tol_rel}};
    j["observables"] = {{"side", c.observables.side},
                        {"n", c.observables.n},
                        {"points", c.observables.points},
                        {"t_values", c.observables.t_values},
                        {"t_c", c.observables.t_c ? Json(*c.observables.t_c) : Json(nullptr)},
                        {"high_t_above", c.observables.high_t_above}};
    j["oracle"] = {{"n", c.oracle.n}, {"beta", c.oracle.beta}};
    return j;
}

namespace {

template <class T>
void take(const Json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw std::invalid_argument(std::string("config key '") + key + "' has the wrong type");
    }
}

const Json& section(const Json& j, const char* key) {
    static const Json empty = Json::object();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_object()) {
        throw std::invalid_argument(std::string("config key '") + key + "' must be an object");
    }
    return j.at(key);
}

}  // namespace

void merge_json(Config& c, const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const char* known[] = {"a",    "grid",     "threads",     "output_dir", "fixed_point",
                                  "spectrum", "flow", "critical", "observables", "oracle"};
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* n : known) ok = ok || k == n;
        if (!ok) throw std::invalid_argument("unknown config key '" + k + "'");
    }
    take(j, "a", c.a);
    const Json& g = section(j, "grid");
    take(g, "L", c.grid_l);
    take(g, "N", c.grid_n);
    take(j, "threads", c.threads);
    take(j, "output_dir", c.output_dir);
    take(section(j, "fixed_point"), "non_gaussian", c.fixed_point.non_gaussian);
    const Json& s = section(j, "spectrum");
    take(s, "k", c.spectrum.k);
    take(s, "at", c.spectrum.at);
    take(s, "fixed_point_file", c.spectrum.fixed_point_file);
    const Json& f = section(j, "flow");
    take(f, "m_max", c.flow.m_max);
    take(f, "t", c.flow.t);
    take(f, "variance", c.flow.variance);
    const Json& cr = section(j, "critical");
    take(cr, "m_max", c.critical.m_max);
    take(cr, "tol_rel", c.critical.tol_rel);
    const Json& o = section(j, "observables");
    take(o, "side", c.observables.side);
    take(o, "n", c.observables.n);
    take(o, "points", c.observables.points);
    take(o, "t_values", c.observables.t_values);
    if (o.contains("t_c")) {
        if (o.at("t_c").is_null()) {
            c.observables.t_c.reset();
        } else {
            double t = 0.0;
            take(o, "t_c", t);
            c.observables.t_c = t;
        }
    }
    take(o, "high_t_above", c.observables.high_t_above);
    const Json& r = section(j, "oracle");
    take(r, "n", c.oracle.n);
    take(r, "beta", c.oracle.beta);
}

std::string validate(const Config& c) {
    if (!(c.a > 1.0 && c.a < 2.0)) return "a must lie in (1, 2)";
    if (!(c.grid_l > 0.0) || !std::isfinite(c.grid_l)) return "grid L must be positive";
    if (c.grid_n < 16 || c.grid_n % 2 != 0 || c.grid_n > 16384) {
        return "grid N must be even and in [16, 16384]";
    }
    if (c.threads < 0) return "threads must be nonnegative";
    if (c.output_dir.empty()) return "output directory must not be empty";
    if (c.command == "fixed-point" && c.fixed_point.non_gaussian &&
        !(c.a > 1.5 && c.a <= 1.6 + 1e-12)) {
        return "the non-Gaussian fixed point needs 1.5 < a <= 1.6";
    }
    if (c.spectrum.k < 1 || c.spectrum.k > 10) return "k must be in [1, 10]";
    if (c.spectrum.at != "gaussian" && c.spectrum.at != "non-gaussian") {
        return "--at must be gaussian or non-gaussian";
    }
    if (c.command == "spectrum" && c.spectrum.at == "non-gaussian" && !(c.a > 1.5)) {
        return "the non-Gaussian spectrum needs a > 1.5";
    }
    if (c.flow.m_max < 1) return "flow m_max must be positive";
    if (!(c.flow.variance >= 0.0)) return "flow variance must be nonnegative";
    if (c.critical.m_max < 1) return "critical m_max must be positive";
    if (!(c.critical.tol_rel >= 1e-13 && c.critical.tol_rel < 1.0)) {
        return "critical tol_rel must be in [1e-13, 1)";
    }
    if (c.observables.side != "high" && c.observables.side != "low") {
        return "--side must be high or low";
    }
    if (c.observables.n < 1) return "observables n must be positive";
    if (c.observables.points < 4 || c.observables.points > 64) {
        return "observables points must be in [4, 64]";
    }
    if (c.oracle.n < 0 || c.oracle.n > 4) return "oracle n must be in [0, 4]";
    if (!(c.oracle.beta >= 0.0) || !std::isfinite(c.oracle.beta)) {
        return "oracle beta must be nonnegative";
    }
    return {};
}

namespace {

struct BadConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

GridSpec grid_of(const Config& c) { return {c.grid_l, c.grid_n}; }

fs::path out_path(const Config& c, const std::string& name) { return fs::path(c.output_dir) / name; }

Json maybe(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

fs::path fixed_point_file(const Config& c) {
    return c.spectrum.fixed_point_file.empty() ? out_path(c, "fixed_point.json")
                                               : fs::path(c.spectrum.fixed_point_file);
}

// Non-Gaussian fixed point from the artifact.
GridDensity load_fixed_point(const Config& c, const fs::path& file) {
    if (!fs::exists(file)) throw MissingInput("fixed point artifact " + file.string() + " not found");
    Json j = io::read_json(file);
    if (j.value("kind", "") != "non-gaussian") {
        throw BadConfig(file.string() + " does not hold a non-Gaussian fixed point");
    }
    if (std::fabs(j.value("a", 0.0) - c.a) > 1e-12) {
        throw BadConfig(file.string() + " was computed for a different a");
    }
    fs::path dens = file.parent_path() / j.value("density_file", "");
    if (!fs::exists(dens)) throw MissingInput("density file " + dens.string() + " not found");
    GridDensity p = io::density_from_json(io::read_json(dens));
    if (!(p.grid() == grid_of(c))) throw BadConfig(dens.string() + " uses a different grid");
    return p;
}

// Artifact if present, otherwise solved here.
GridDensity non_gaussian_fixed_point(const Config& c) {
    fs::path file = fixed_point_file(c);
    if (fs::exists(file)) return load_fixed_point(c, file);
    ModelParams params(c.a);
    EpsilonSeed seed = epsilon_seed(params, grid_of(c));
    FixedPointResult fp = solve_fixed_point(seed.density, params, {}, seed.c);
    if (fp.status != SolveStatus::Converged) {
        throw ConvergenceError("non-Gaussian fixed point did not converge");
    }
    return fp.density;
}

DensityFamily family_for(const Config& c, bool widen = true) {
    ModelParams params(c.a);
    DensityFamily fam = c.a <= 1.5 ? default_family(params, grid_of(c))
                                   : default_family(params, non_gaussian_fixed_point(c));
    return widen ? widen_to_bracket(fam, c.critical.m_max) : fam;
}

// Unstable eigenvalue of the fixed point the family passes through.
double lambda1_for(const Config& c, const DensityFamily& fam) {
    ModelParams params(c.a);
    if (fam.kind == BaseKind::Gaussian) return gaussian_eigenvalue(1, params);
    Spectrum s = eigen_spectrum(build_linearization(fam.base, params), 2);
    return s.eigenvalues.at(1);
}

Json brackets_json(const CriticalSearchResult& r) {
    Json b = Json::array();
    for (const auto& [lo, hi] : r.brackets) b.push_back({lo, hi});
    return b;
}

int cmd_fixed_point(const Config& c) {
    ModelParams params(c.a);
    GridSpec g = grid_of(c);
    FixedPointResult fr;
    Json extra;
    if (c.fixed_point.non_gaussian) {
        EpsilonSeed seed = epsilon_seed(params, g);
        fr = solve_fixed_point(seed.density, params, {}, seed.c);
        TailBound tb = fit_tail_bound(fr.density, params);
        extra["tail_bound"] = {{"C0", tb.C0}, {"c0", tb.c0}, {"worst_ratio", tb.worst_ratio}};
    } else {
        fr.density = gaussian_fixed_point(params, g);
        fr.residual_l1 = l1_distance(rg_step(fr.density, params), fr.density);
        fr.newton_trace.push_back({0, fr.residual_l1, 0.0});
        fr.status = fr.residual_l1 < NewtonOptions{}.tolerance ? SolveStatus::Converged
                                                               : SolveStatus::Stalled;
    }
    const std::string dens = "fixed_point_density.json";
    io::write_density_csv(out_path(c, "fixed_point_density.csv"), fr.density);
    io::write_json(out_path(c, dens), io::density_json(fr.density));
    Json j;
    j["a"] = c.a;
    j["kind"] = c.fixed_point.non_gaussian ? "non-gaussian" : "gaussian";
    j["variance"] = variance(fr.density);
    j.update(io::fixed_point_json(fr, dens));
    if (!extra.is_null()) j.update(extra);
    io::write_json(out_path(c, "fixed_point.json"), j);
    std::cout << "fixed point " << j["kind"].get<std::string>() << " a=" << c.a
              << " variance=" << io::fmt(variance(fr.density))
              << " residual=" << io::fmt(fr.residual_l1) << '\n';
    return fr.residual_l1 < 1e-8 ? kOk : kNoConvergence;
}

int cmd_spectrum(const Config& c) {
    ModelParams params(c.a);
    GridSpec g = grid_of(c);
    bool ng = c.spectrum.at == "non-gaussian";
    GridDensity base = ng ? load_fixed_point(c, fixed_point_file(c)) : gaussian_fixed_point(params, g);
    Spectrum s = eigen_spectrum(build_linearization(base, params), c.spectrum.k);
    Json j;
    j["a"] = c.a;
    j["at"] = c.spectrum.at;
    j.update(io::spectrum_json(s));
    if (!ng) {
        std::vector<double> expected;
        for (int i = 0; i < c.spectrum.k; ++i) expected.push_back(gaussian_eigenvalue(i, params));
        j["expected"] = expected;
    }
    io::write_json(out_path(c, "spectrum.json"), j);
    {
        std::ofstream out(out_path(c, "eigenvalues.csv"), std::ios::binary);
        out << "j,eigenvalue,residual\n";
        for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
            out << i << ',' << io::fmt(s.eigenvalues[i]) << ',' << io::fmt(s.residuals[i]) << '\n';
        }
    }
    for (size_t i = 0; i < s.eigenfunctions.size(); ++i) {
        io::write_eigenfunction_csv(out_path(c, "eigenfunction_" + std::to_string(i) + ".csv"), g,
                                    s.eigenfunctions[i]);
    }
    for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        std::cout << "lambda_" << i << " = " << io::fmt(s.eigenvalues[i]) << '\n';
    }
    return kOk;
}

int cmd_flow(const Config& c) {
    ModelParams params(c.a);
    GridSpec g = grid_of(c);
    DensityFamily fam = family_for(c, false);
    Json start;
    GridDensity p0;
    if (c.flow.variance > 0.0) {
        p0 = gaussian_density(c.flow.variance, g);
        start = {{"gaussian_variance", c.flow.variance}};
    } else {
        p0 = family_density(fam, c.flow.t);
        start = {{"family_t", c.flow.t}};
    }
    FlowTrace tr = flow(p0, fam.base, params, c.flow.m_max);
    io::write_flow_csv(out_path(c, "flow.csv"), tr);
    Json j;
    j["a"] = c.a;
    j["start"] = start;
    j["target"] = to_string(fam.kind);
    j["classification"] = to_string(tr.classification);
    j["steps"] = tr.steps;
    j["min_l1"] = tr.min_l1;
    j["stay_steps"] = tr.stay_steps;
    io::write_json(out_path(c, "flow.json"), j);
    std::cout << "flow " << to_string(tr.classification) << " after " << tr.steps << " steps\n";
    return kOk;
}

CriticalSearchResult run_search(const Config& c, const DensityFamily& fam) {
    return critical_search(fam, c.critical.m_max, c.critical.tol_rel * (fam.t_hi - fam.t_lo));
}

int cmd_critical(const Config& c) {
    DensityFamily fam = family_for(c);
    CriticalSearchResult r = run_search(c, fam);
    DriftFit df = drift_onset_fit(r);
    double l1 = lambda1_for(c, fam);
    Json j;
    j["a"] = c.a;
    j["t_c"] = r.t_c;
    j["brackets"] = brackets_json(r);
    j["gamma_fit"] = nullptr;
    j["beta_fit"] = nullptr;
    j["lambda1_used"] = l1;
    j["base"] = to_string(r.fixed_point_used);
    j["high_t_above"] = r.high_t_above;
    j["m_used"] = r.m_used;
    j["terminal_l1"] = r.terminal_l1;
    j["drift"] = {{"slope", maybe(df.slope)}, {"stderr", maybe(df.stderr_)}, {"points", df.points},
                  {"expected_slope", 1.0 / std::log2(l1)}};
    io::write_json(out_path(c, "critical.json"), j);
    std::ofstream out(out_path(c, "probes.csv"), std::ios::binary);
    out << "t,classification,steps,min_l1,stay_steps\n";
    for (const auto& p : r.probes) {
        out << io::fmt(p.t) << ',' << to_string(p.classification) << ',' << p.steps << ','
            << io::fmt(p.min_l1) << ',' << p.stay_steps << '\n';
    }
    std::cout << "t_c = " << io::fmt(r.t_c) << " after " << r.brackets.size() << " brackets\n";
    return kOk;
}

int cmd_observables(const Config& c) {
    ModelParams params(c.a);
    DensityFamily fam = family_for(c);
    Json brackets = Json::array();
    double t_c = 0.0;
    bool above = c.observables.high_t_above;
    if (c.observables.t_c) {
        t_c = *c.observables.t_c;
    } else {
        CriticalSearchResult r = run_search(c, fam);
        t_c = r.t_c;
        above = r.high_t_above;
        brackets = brackets_json(r);
    }
    bool high = c.observables.side == "high";
    std::vector<double> ts = c.observables.t_values;
    if (ts.empty()) {
        ts = fit_window(fam, t_c, above, high ? Regime::HighT : Regime::LowT, c.observables.points);
    }
    ObservableOptions opt;
    opt.n = c.observables.n;
    auto pts = high ? susceptibility_curve(fam, t_c, ts, opt) : magnetization_curve(fam, t_c, ts, opt);

    std::vector<std::pair<double, double>> fit_pts;
    Json pj = Json::array();
    for (const auto& p : pts) {
        if (!p.flagged) fit_pts.push_back({std::fabs(p.t - t_c), high ? p.tau : p.m});
        pj.push_back({{"t", p.t},
                      {"tau", maybe(p.tau)},
                      {"M", maybe(p.m)},
                      {"M_second", maybe(p.m_second)},
                      {"switch_level", p.switch_level},
                      {"flagged", p.flagged},
                      {"note", p.note}});
    }
    if (high) {
        io::write_tau_csv(out_path(c, "susceptibility.csv"), pts);
    } else {
        io::write_magnetization_csv(out_path(c, "magnetization.csv"), pts);
    }

    double l1 = lambda1_for(c, fam);
    CriticalExponents pred = exponents_from_spectrum(l1, params);
    Json j;
    j["a"] = c.a;
    j["side"] = c.observables.side;
    j["t_c"] = t_c;
    j["brackets"] = brackets;
    j["gamma_fit"] = nullptr;
    j["beta_fit"] = nullptr;
    j["lambda1_used"] = l1;
    j["predicted"] = {{"gamma", pred.gamma}, {"beta", pred.beta}};
    int status = kOk;
    if (fit_pts.size() >= 4) {
        PowerFit f = fit_exponent(fit_pts);
        j[high ? "gamma_fit" : "beta_fit"] = high ? -f.slope : f.slope;
        j["fit_stderr"] = f.stderr_;
        j["fit_points"] = f.points;
        std::cout << (high ? "gamma" : "beta") << " = " << io::fmt(high ? -f.slope : f.slope)
                  << " +- " << io::fmt(f.stderr_) << '\n';
    } else {
        std::cout << "fewer than 4 unflagged points; no fit\n";
        status = kNoConvergence;
    }
    j["points"] = pj;
    io::write_json(out_path(c, "summary.json"), j);
    return status;
}

int cmd_oracle(const Config& c) {
    AtomicMeasure nu = AtomicMeasure::ising();
    AtomicMeasure rec = nu;
    for (int i = 0; i < c.oracle.n; ++i) rec = rg_step_atomic(rec, c.oracle.beta, c.a);
    AtomicMeasure en = enumerate_total_spin(c.oracle.n, nu, c.oracle.beta, c.a);
    double err = max_atom_error(rec, en);
    Json atoms = Json::array();
    for (const auto& at : en.atoms()) atoms.push_back({{"location", at.location}, {"weight", at.weight}});
    Json j;
    j["n"] = c.oracle.n;
    j["beta"] = c.oracle.beta;
    j["a"] = c.a;
    j["max_atom_error"] = maybe(err);
    j["total_variation"] = maybe(total_variation(rec, en));
    j["atoms"] = atoms;
    io::write_json(out_path(c, "oracle.json"), j);
    std::cout << "oracle n=" << c.oracle.n << " atoms=" << en.size() << " max error " << io::fmt(err)
              << '\n';
    return err <= 1e-10 ? kOk : kMismatch;
}

// A CLI option whose value, when given, overrides the config.
struct Override {
    CLI::Option* opt;
    std::function<void(Config&)> apply;
};

template <class T, class F>
void option(CLI::App* app, std::vector<Override>& ov, const std::string& name, const std::string& help,
            F field) {
    auto v = std::make_shared<T>();
    CLI::Option* o = app->add_option(name, *v, help);
    ov.push_back({o, [v, field](Config& c) { field(c) = *v; }});
}

template <class F>
void flag(CLI::App* app, std::vector<Override>& ov, const std::string& name, const std::string& help,
          F field) {
    auto v = std::make_shared<bool>(false);
    CLI::Option* o = app->add_flag(name, *v, help);
    ov.push_back({o, [v, field](Config& c) { field(c) = *v; }});
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Numerical renormalization group laboratory for the Dyson hierarchical model"};
    app.require_subcommand(1);
    std::vector<Override> ov;
    std::string config_file;
    bool print_config = false;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", config_file, "JSON config; flags override its values");
        s->add_flag("--print-config", print_config, "Print the effective config and exit");
        option<double>(s, ov, "--a", "Coupling decay exponent, 1 < a < 2", [](Config& c) -> double& { return c.a; });
        option<std::string>(s, ov, "--output-dir", "Artifact directory",
                            [](Config& c) -> std::string& { return c.output_dir; });
        option<int>(s, ov, "--threads", "Worker threads (0: all cores)", [](Config& c) -> int& { return c.threads; });
        option<int>(s, ov, "--grid-n", "Grid intervals N", [](Config& c) -> int& { return c.grid_n; });
        option<double>(s, ov, "--grid-l", "Grid half-width L", [](Config& c) -> double& { return c.grid_l; });
    };

    auto* fp = app.add_subcommand("fixed-point", "Gaussian or non-Gaussian fixed point");
    common(fp);
    flag(fp, ov, "--non-gaussian", "Solve for the non-Gaussian fixed point (1.5 < a <= 1.6)",
         [](Config& c) -> bool& { return c.fixed_point.non_gaussian; });

    auto* sp = app.add_subcommand("spectrum", "Top eigenvalues of the linearized map");
    common(sp);
    option<int>(sp, ov, "--k", "Number of eigenpairs", [](Config& c) -> int& { return c.spectrum.k; });
    option<std::string>(sp, ov, "--at", "gaussian or non-gaussian",
                        [](Config& c) -> std::string& { return c.spectrum.at; });
    option<std::string>(sp, ov, "--fixed-point", "Fixed point artifact (default <output-dir>/fixed_point.json)",
                        [](Config& c) -> std::string& { return c.spectrum.fixed_point_file; });

    auto* fl = app.add_subcommand("flow", "Iterate the RG map from a family member or a Gaussian");
    common(fl);
    option<int>(fl, ov, "--m-max", "Maximum steps", [](Config& c) -> int& { return c.flow.m_max; });
    option<double>(fl, ov, "--t", "Family parameter of the start", [](Config& c) -> double& { return c.flow.t; });
    option<double>(fl, ov, "--variance", "Start from a Gaussian of this variance",
                   [](Config& c) -> double& { return c.flow.variance; });

    auto* cr = app.add_subcommand("critical", "Locate t_c by nested bisection");
    common(cr);
    option<int>(cr, ov, "--m-max", "Maximum steps per probe", [](Config& c) -> int& { return c.critical.m_max; });
    option<double>(cr, ov, "--tol-rel", "Final bracket width relative to the family range",
                   [](Config& c) -> double& { return c.critical.tol_rel; });

    auto* ob = app.add_subcommand("observables", "Susceptibility or magnetization curve and exponent fit");
    common(ob);
    option<std::string>(ob, ov, "--side", "high or low", [](Config& c) -> std::string& { return c.observables.side; });
    option<int>(ob, ov, "--n", "Reporting level", [](Config& c) -> int& { return c.observables.n; });
    option<int>(ob, ov, "--points", "Points in the default fit window",
                [](Config& c) -> int& { return c.observables.points; });
    option<std::vector<double>>(ob, ov, "--t-values", "Explicit t values",
                                [](Config& c) -> std::vector<double>& { return c.observables.t_values; });
    option<double>(ob, ov, "--t-c", "Known t_c; skips the search", [](Config& c) -> std::optional<double>& {
        return c.observables.t_c;
    });
    flag(ob, ov, "--high-t-above", "With --t-c: the high-temperature side is t > t_c",
         [](Config& c) -> bool& { return c.observables.high_t_above; });
    option<int>(ob, ov, "--m-max", "Maximum steps per probe", [](Config& c) -> int& { return c.critical.m_max; });
    option<double>(ob, ov, "--tol-rel", "Final bracket width relative to the family range",
                   [](Config& c) -> double& { return c.critical.tol_rel; });

    auto* orc = app.add_subcommand("oracle", "Enumeration against the measure recursion, Ising spins");
    common(orc);
    option<int>(orc, ov, "--n", "Levels", [](Config& c) -> int& { return c.oracle.n; });
    option<double>(orc, ov, "--beta", "Inverse temperature", [](Config& c) -> double& { return c.oracle.beta; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kBadConfig;
    }

    Config cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    try {
        if (!config_file.empty()) {
            if (!fs::exists(config_file)) {
                std::cerr << "config file " << config_file << " not found\n";
                return kBadConfig;
            }
            merge_json(cfg, io::read_json(config_file));
        }
        for (auto& o : ov) {
            if (o.opt->count() > 0) o.apply(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "bad config: " << e.what() << '\n';
        return kBadConfig;
    }
    if (std::string err = validate(cfg); !err.empty()) {
        std::cerr << "bad config: " << err << '\n';
        return kBadConfig;
    }
    if (print_config) {
        std::cout << to_json(cfg).dump(2) << '\n';
        return kOk;
    }
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
        std::cerr << "bad config: cannot create output directory " << cfg.output_dir << '\n';
        return kBadConfig;
    }
    set_thread_count(cfg.threads > 0 ? cfg.threads
                                     : std::max(1u, std::thread::hardware_concurrency()));

    try {
        if (cfg.command == "fixed-point") return cmd_fixed_point(cfg);
        if (cfg.command == "spectrum") return cmd_spectrum(cfg);
        if (cfg.command == "flow") return cmd_flow(cfg);
        if (cfg.command == "critical") return cmd_critical(cfg);
        if (cfg.command == "observables") return cmd_observables(cfg);
        if (cfg.command == "oracle") return cmd_oracle(cfg);
    } catch (const MissingInput& e) {
        std::cerr << "missing input: " << e.what() << '\n';
        return kMissingInput;
    } catch (const BadConfig& e) {
        std::cerr << "bad config: " << e.what() << '\n';
        return kBadConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o: " << e.what() << '\n';
        return kMissingInput;
    } catch (const DomainError& e) {
        std::cerr << "bad config: " << e.what() << '\n';
        return kBadConfig;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNoConvergence;
    }
    return kBadConfig;
}

}  // namespace dyson::cli
