#pragma once

#include <string>
#include <vector>

#include "dyson/density.hpp"
#include "dyson/params.hpp"

namespace dyson {

// Output variable y = (x1 + x2) / ratio with pair weight e^{beta x1 x2}.
struct BlockCoupling {
    double beta = 1.0;
    double ratio = 1.0;
};

// Unnormalized output: log values at s = i h (i = 0..N/2) and log of the
// trapezoid mass over the full grid.
struct BlockOutput {
    std::vector<double> half_log;
    double log_mass = 0.0;
};

// With a tail model, log p beyond the grid edge is taken from it instead of -inf.
BlockOutput block_step_raw(const GridDensity& p, BlockCoupling bc,
                           const LogTail* tail = nullptr);
// Normalized output. Throws NormalizerDivergence when the result reaches the grid edge.
GridDensity block_step(const GridDensity& p, BlockCoupling bc, const LogTail* tail = nullptr);

// The density map at beta = 1.
GridDensity rg_step(const GridDensity& p, const ModelParams& params);
GridDensity rg_step_general_beta(const GridDensity& p, double beta, const ModelParams& params);

// 2^(1-a) v / (1 - v); DomainError unless 0 < v < 1.
double gaussian_variance_map(double v, const ModelParams& params);

enum class Classification { ConvergedToFixedPoint, CollapsedHighT, EscapedLowT, Undecided };
const char* to_string(Classification c);

struct FlowStep {
    int m = 0;
    double variance = 0.0;
    double kurtosis = 0.0;  // excess kurtosis
    double fourth_cumulant = 0.0;
    double l1_to_fp = 0.0;
    double peak = 0.0;  // positive peak location, 0 when unimodal
    Classification classification = Classification::Undecided;
};

struct FlowOptions {
    bool stop_at_fixed_point = true;
    double fixed_point_tol = 1e-6;
    double collapse_ratio = 0.25;
    int collapse_steps = 3;
    double escape_ratio = 4.0;
    double edge_mass_limit = 0.02;
    int edge_cells = 2;
    double stay_radius = 0.1;
};

struct FlowTrace {
    ModelParams params;
    std::vector<FlowStep> iterates;
    GridDensity final_density;
    Classification classification = Classification::Undecided;
    int steps = 0;
    double min_l1 = 0.0;
    int stay_steps = 0;  // iterates within stay_radius of the fixed point
};

// Flow toward the Gaussian fixed point p*_0 of params.
FlowTrace flow(const GridDensity& p0, const ModelParams& params, int m_max,
               const FlowOptions& options = {});
// Flow with an explicit target fixed point for distances and thresholds.
FlowTrace flow(const GridDensity& p0, const GridDensity& target, const ModelParams& params,
               int m_max, const FlowOptions& options = {});

// Law of sum / |V_n|^(1/2) from the stored n-th iterate.
GridDensity rescale_to_clt(const GridDensity& p, int n, const ModelParams& params);

// Density of S_n / l_n for a block sum S_n; coupling beta_n = l_n^2 / 2^(n a).
struct FramedDensity {
    GridDensity density;
    int level = 0;
    double log2_scale = 0.0;
    double log2_beta = 0.0;
    double last_ratio = 0.0;
};

struct FrameOptions {
    double target = 0.8;  // extent as a fraction of L
    double low = 0.6;
    double high = 0.9;
    double drop = 30.0;  // log drop defining the extent
    int max_attempts = 40;
    // Continue log p past the grid edge with a fitted even quartic.
    bool extrapolate_tails = true;
};

// Largest |s| with log p(s) >= max log p - drop.
double density_extent(const GridDensity& p, double drop);
FramedDensity framed_start(const GridDensity& p0);
// One block step with the ratio chosen to keep the extent near the target.
FramedDensity framed_step(const FramedDensity& state, const ModelParams& params,
                          const FrameOptions& options = {});

// Parabolic refinement of the largest log value on s >= 0.
double peak_location(const GridDensity& p);

}  // namespace dyson
