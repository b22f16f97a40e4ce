#pragma once

#include <vector>

#include "dyson/params.hpp"

namespace dyson {

// Even probability density on the uniform grid s_i = -L + 2Li/N.
// Values are held as logarithms so that far tails keep full relative precision.
class GridDensity {
public:
    GridDensity() = default;

    // Full vector of N+1 log values; must be even. Normalized on construction.
    static GridDensity from_log(const GridSpec& grid, std::vector<double> log_values,
                                bool check_tails = true);
    // Log values at s = i*h for i = 0..N/2, mirrored to the negative side.
    static GridDensity from_half_log(const GridSpec& grid, const std::vector<double>& half,
                                     bool check_tails = true);
    static GridDensity from_values(const GridSpec& grid, const std::vector<double>& values,
                                   bool check_tails = true);

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& log_values() const { return log_; }
    std::vector<double> values() const;
    std::vector<double> half_log() const;
    double value(int i) const;

    // Cubic Lagrange interpolation of the log density; -inf off the grid.
    double log_at(double s) const;
    double at(double s) const;

    // Density value at s = +-L.
    double edge_value() const { return value(grid_.n); }
    bool empty() const { return log_.empty(); }

private:
    GridSpec grid_{};
    std::vector<double> log_;
};

// Quartic c0 + c1 s + ... + c4 s^4 fitted to the resolved part of a log
// density, used past the grid edge. Falls back to a quadratic when c4 >= 0;
// inactive if that does not decay either.
struct LogTail {
    bool active = false;
    double c[5] = {0, 0, 0, 0, 0};
    double operator()(double s) const;
    // Coefficients of the same polynomial in powers of (s - x0).
    void taylor(double x0, double d[5]) const;
};
// Least squares over nodes within `depth` of the maximum; `even` drops odd powers.
LogTail fit_log_tail(const GridSpec& grid, const std::vector<double>& log_values,
                     double depth = 40.0, bool even = false);
LogTail fit_log_tail(const GridDensity& p, double depth = 40.0);

// Trapezoid weights of the grid.
std::vector<double> trapezoid_weights(const GridSpec& grid);
double trapezoid(const GridSpec& grid, const std::vector<double>& f);
// log of sum_i w_i exp(lv_i) with trapezoid weights.
double log_trapezoid(const GridSpec& grid, const std::vector<double>& lv);

// Throws TailContainmentError unless L > 8 sqrt(tau).
GridDensity gaussian_density(double tau, const GridSpec& grid);

// k-th moment; zero for odd k.
double moments(const GridDensity& p, int k);
double variance(const GridDensity& p);
double excess_kurtosis(const GridDensity& p);
double fourth_cumulant(const GridDensity& p);
double l1_distance(const GridDensity& p, const GridDensity& q);
// Mass within `cells` grid cells of either edge.
double edge_mass(const GridDensity& p, int cells);

// Physicists' Hermite polynomial H_k(x).
double hermite_physicists(int k, double x);
// G_{2j}(s) = H_{2j}(gamma s) with the model's gamma scale; j <= 12.
double hermite_G(int j, double s, const ModelParams& params);
double hermite_G(int j, double s, double gamma);

// Coefficients of G_{2j} p*_0, j = 0..M-1.
struct HermiteCoeffs {
    ModelParams params;
    double gamma = 0.0;
    std::vector<double> coeffs;
};

struct GramDiagnostics {
    double condition_number = 0.0;
    double max_offdiag = 0.0;  // largest |G_mn| / sqrt(G_mm G_nn), m != n
};

// Projection under <f,g> = int f g e^{-gamma^2 s^2} / p*_0^2 ds. The family
// G_{2j} p*_0 is orthogonal for this weight at any gamma.
HermiteCoeffs project_to_hermite(const GridDensity& p, int M, const ModelParams& params);
HermiteCoeffs project_to_hermite(const GridDensity& p, int M, const ModelParams& params,
                                 double gamma);
HermiteCoeffs project_values(const GridSpec& grid, const std::vector<double>& f, int M,
                             const ModelParams& params, double gamma);
// Grid values of sum_j c_j G_{2j} p*_0.
std::vector<double> reconstruct(const HermiteCoeffs& c, const GridSpec& grid);

GramDiagnostics gram_diagnostics(const GridSpec& grid, int M, double gamma);
// Gram matrix of {G_{2j} p*_0} under the plain 1/p*_0 weight.
GramDiagnostics gram_diagnostics_inverse_weight(const GridSpec& grid, int M,
                                                const ModelParams& params, double gamma);

}  // namespace dyson
