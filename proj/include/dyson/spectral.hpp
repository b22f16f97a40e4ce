#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dyson/density.hpp"
#include "dyson/params.hpp"

namespace dyson {

// Derivative of the unnormalized density map at a fixed point, with the
// normalizer frozen, restricted to even functions. Acts on values at s = i h,
// i = 0..N/2.
struct LinearizedOperator {
    Eigen::MatrixXd matrix;
    GridDensity base_point;
    ModelParams params;
    double normalizer = 0.0;
    double base_residual = 0.0;

    // Full-grid function in, full-grid function out; only the even part acts.
    std::vector<double> apply(const std::vector<double>& full) const;
};

// Throws NotAFixedPoint when the L1 residual of base exceeds residual_tol.
LinearizedOperator build_linearization(const GridDensity& base, const ModelParams& params,
                                       double residual_tol = 1e-6);

struct Spectrum {
    std::vector<double> eigenvalues;  // descending by magnitude
    std::vector<double> imag_parts;
    // Full-grid eigenfunctions, unit Euclidean norm, positive at s = 0.
    std::vector<std::vector<double>> eigenfunctions;
    std::vector<double> residuals;  // |L e - lambda e| / |e|
};

// Top-k eigenpairs, k <= 10. Throws ConvergenceError if an eigenvector does not settle.
Spectrum eigen_spectrum(const LinearizedOperator& op, int k);

struct CriticalExponents {
    double gamma = 0.0;
    double beta = 0.0;
};

// gamma = (a-1)/log2(lambda1), beta = (2-a)/(2 log2(lambda1)); lambda1 > 1.
CriticalExponents exponents_from_spectrum(double lambda1, const ModelParams& params);

// 2^(1-(2-a)j).
double gaussian_eigenvalue(int j, const ModelParams& params);
// G_{2j}(s) p*_0(s) on the full grid with Hermite scale gamma.
std::vector<double> gaussian_eigenfunction(int j, const GridSpec& grid, const ModelParams& params,
                                           double gamma);
double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dyson
