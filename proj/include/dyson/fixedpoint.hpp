#pragma once

#include <vector>

#include "dyson/density.hpp"
#include "dyson/params.hpp"

namespace dyson {

// gaussian_density(sigma(a)).
GridDensity gaussian_fixed_point(const ModelParams& params, const GridSpec& grid);

// Normalized p*_0(s) e^{-c eps G4(s)}, G4 taken at the eigenfunction scale.
GridDensity ansatz_density(const ModelParams& params, const GridSpec& grid, double c);
// G4 coefficient of log R(p) - log p under the Gaussian weight of the eigen scale.
double g4_residual_component(const GridDensity& p, const ModelParams& params);

struct EpsilonSeed {
    GridDensity density;
    double c = 0.0;
};

// The ansatz with c chosen so the G4 residual component vanishes; 0 <= eps <= 0.1.
// Throws NoSignChange when no root exists on (0, 10].
EpsilonSeed epsilon_seed(const ModelParams& params, const GridSpec& grid);

struct NewtonRecord {
    int step = 0;
    double residual = 0.0;
    double damping = 0.0;
};

enum class SolveStatus { Converged, Stalled };

struct FixedPointResult {
    GridDensity density;
    double residual_l1 = 0.0;
    std::vector<NewtonRecord> newton_trace;
    double c = 0.0;
    SolveStatus status = SolveStatus::Stalled;
};

struct NewtonOptions {
    int max_steps = 30;
    double tolerance = 1e-8;   // accepted residual
    double polish = 1e-13;     // iteration stops below this
    int max_halvings = 20;
    int stall_window = 5;
    double stall_reduction = 0.01;
};

// Damped Newton on the half-grid log density for R(p) = p. The seed residual
// must be below 0.1.
FixedPointResult solve_fixed_point(const GridDensity& seed, const ModelParams& params,
                                   const NewtonOptions& options = {}, double seed_c = 0.0);

// Normalized map output and its Jacobian in half-grid log coordinates.
struct LogMapJacobian {
    std::vector<double> half_log;
    std::vector<double> jacobian;  // row-major K x K
};
LogMapJacobian log_map_jacobian(const GridDensity& p, const ModelParams& params);

// p(s) <= C0 p*_0(s) exp(-c0 eps s^4) on the grid.
struct TailBound {
    double C0 = 0.0;
    double c0 = 0.0;
    double worst_ratio = 0.0;  // max p / bound, at most 1 by construction
};
TailBound fit_tail_bound(const GridDensity& p, const ModelParams& params);

}  // namespace dyson
