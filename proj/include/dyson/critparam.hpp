#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dyson/density.hpp"
#include "dyson/params.hpp"
#include "dyson/rgflow.hpp"

namespace dyson {

enum class BaseKind { Gaussian, NonGaussian };
const char* to_string(BaseKind k);

// p_t(s) = C p*(s) exp(b2(t) G2(s) + b4 G4(s)) with b2(t) = slope t + offset.
struct DensityFamily {
    ModelParams params;
    GridDensity base;  // fixed point the family passes through at b2 = b4 = 0
    BaseKind kind = BaseKind::Gaussian;
    double b2_slope = 1.0;
    double b2_offset = 0.0;
    double b4 = 0.0;
    double t_lo = -0.1;
    double t_hi = 0.1;
    double gamma = 0.0;  // Hermite scale of G2 and G4
    // Replaces the exponential form when set.
    std::function<GridDensity(double)> custom;

    double b2(double t) const { return b2_slope * t + b2_offset; }
};

// a <= 1.5: base p*_0, b4 = -0.01, t in [-0.2, 0.2].
// a > 1.5: base p*_1 (passed in), b4 = -eps^2, width eps^(3/2) around 0.
DensityFamily default_family(const ModelParams& params, const GridSpec& grid);
DensityFamily default_family(const ModelParams& params, const GridDensity& non_gaussian_base);

// Throws TailContainmentError when p_t is not contained on the grid.
GridDensity family_density(const DensityFamily& fam, double t);

struct ProbeRecord {
    double t = 0.0;
    Classification classification = Classification::Undecided;
    int steps = 0;
    double min_l1 = 0.0;
    int stay_steps = 0;
};

struct CriticalSearchResult {
    std::vector<std::pair<double, double>> brackets;
    double t_c = 0.0;
    BaseKind fixed_point_used = BaseKind::Gaussian;
    int m_used = 0;
    double terminal_l1 = 0.0;  // min distance to the fixed point along the flow at t_c
    bool high_t_above = true;  // whether t > t_c collapses
    std::vector<ProbeRecord> probes;
    ProbeRecord tc_probe;
};

// Bisection on t until the bracket is narrower than tol_t (never below 1e-13
// of the initial width). Probe flows run to a decision without stopping at the
// fixed point.
CriticalSearchResult critical_search(const DensityFamily& fam, int m_max, double tol_t);

// Doubles the range about its centre until the endpoint probes land in
// different phases. Throws SameClassificationAtEndpoints past max_half_width.
DensityFamily widen_to_bracket(DensityFamily fam, int m_max, double max_half_width = 0.5);

// Slope of stay duration against -log2(bracket width), using for each bracket
// the shorter stay of its two endpoint probes.
struct DriftFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    int points = 0;
};
DriftFit drift_onset_fit(const CriticalSearchResult& res);

enum class Regime { HighT, LowT, Unresolved };
const char* to_string(Regime r);

struct ObservableOptions {
    int n = 256;            // reporting level
    int max_levels = 600;   // framed steps before giving up
    double high_kurtosis = 1e-8;
    double low_kurtosis = 1e-4;
    double low_skewness = 1e-3;
    double valley_depth = 40.0;
    double rho_fraction = 0.125;  // switch once beta * variance < sigma * rho_fraction
    FrameOptions frame;
    // The peak frame leaves room for the field, which draws on the far right tail.
    FrameOptions peak_frame{0.4, 0.3, 0.5, 30.0, 40};
};

// Finite-volume observables at level n from the framed flow, continued
// exactly once the state is Gaussian (high T) or a pair of separated
// Gaussian peaks (low T). A bimodal state is followed one peak at a time in a
// frame centred on that peak.
struct ObservableResult {
    Regime regime = Regime::Unresolved;
    int switch_level = -1;
    int level = 0;
    double tau = 0.0;       // CLT variance (half-peak variance at low T)
    double tau_prev2 = 0.0; // same two levels earlier
    double m_peak = 0.0;    // mean-spin peak location
    double m_second = 0.0;  // root second moment of the mean spin
    bool stabilized = false;
};

ObservableResult observe(const GridDensity& p0, const ModelParams& params,
                         const ObservableOptions& options = {});

struct CurvePoint {
    double t = 0.0;
    double tau = 0.0;
    double m = 0.0;
    double m_second = 0.0;
    int switch_level = -1;
    bool flagged = false;
    std::string note;
};

// Points that do not end in the high-T regime, or are not stabilized, are flagged.
std::vector<CurvePoint> susceptibility_curve(const DensityFamily& fam, double t_c,
                                             const std::vector<double>& t_values,
                                             const ObservableOptions& options = {});
// Points that are not bimodal at level n, or are not stabilized, are flagged.
std::vector<CurvePoint> magnetization_curve(const DensityFamily& fam, double t_c,
                                            const std::vector<double>& t_values,
                                            const ObservableOptions& options = {});

// Geometric distances |t - t_c| in [2^-10, 2^-4] |t_range| on the requested phase side.
std::vector<double> fit_window(const DensityFamily& fam, double t_c, bool high_t_above,
                               Regime side, int count);

struct PowerFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    double intercept = 0.0;
    int points = 0;
};

// Least squares of log2 y on log2 x; needs >= 4 points with x, y > 0.
PowerFit fit_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace dyson
