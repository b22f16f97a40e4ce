#include "dyson/density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dyson/error.hpp"
#include "dyson/interp.hpp"

namespace dyson {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTailLimit = 1e-12;

bool close_log(double x, double y) {
    if (x == kNegInf || y == kNegInf) return x == y;
    return std::fabs(x - y) <= 1e-9 * std::max(1.0, std::fabs(x));
}

}  // namespace

std::vector<double> trapezoid_weights(const GridSpec& grid) {
    std::vector<double> w(grid.n + 1, grid.spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

double trapezoid(const GridSpec& grid, const std::vector<double>& f) {
    double h = grid.spacing();
    double sum = 0.5 * (f.front() + f.back());
    for (int i = 1; i < grid.n; ++i) sum += f[i];
    return sum * h;
}

double log_trapezoid(const GridSpec& grid, const std::vector<double>& lv) {
    double mx = *std::max_element(lv.begin(), lv.end());
    if (mx == kNegInf) return kNegInf;
    double sum = 0.5 * (std::exp(lv.front() - mx) + std::exp(lv.back() - mx));
    for (int i = 1; i < grid.n; ++i) sum += std::exp(lv[i] - mx);
    return mx + std::log(sum * grid.spacing());
}

GridDensity GridDensity::from_log(const GridSpec& grid, std::vector<double> lv,
                                  bool check_tails) {
    grid.validate();
    if (static_cast<int>(lv.size()) != grid.n + 1) {
        throw DomainError("log vector length does not match the grid");
    }
    for (double x : lv) {
        if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) {
            throw DomainError("density contains NaN or infinite values");
        }
    }
    for (int i = 0; i < grid.n / 2; ++i) {
        if (!close_log(lv[i], lv[grid.n - i])) {
            throw DomainError("density is not even");
        }
        lv[i] = lv[grid.n - i];
    }
    double lz = log_trapezoid(grid, lv);
    if (!std::isfinite(lz)) throw DomainError("density has zero or infinite mass");
    for (double& x : lv) x -= lz;

    GridDensity d;
    d.grid_ = grid;
    d.log_ = std::move(lv);
    if (check_tails && d.edge_value() >= kTailLimit) {
        throw TailContainmentError("density value at the grid edge is " +
                                   std::to_string(d.edge_value()));
    }
    return d;
}

GridDensity GridDensity::from_half_log(const GridSpec& grid, const std::vector<double>& half,
                                       bool check_tails) {
    grid.validate();
    if (static_cast<int>(half.size()) != grid.half_size()) {
        throw DomainError("half vector length does not match the grid");
    }
    std::vector<double> lv(grid.n + 1);
    int c = grid.center();
    for (int i = 0; i <= c; ++i) {
        lv[c + i] = half[i];
        lv[c - i] = half[i];
    }
    return from_log(grid, std::move(lv), check_tails);
}

GridDensity GridDensity::from_values(const GridSpec& grid, const std::vector<double>& values,
                                     bool check_tails) {
    std::vector<double> lv(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0) throw DomainError("density values must be nonnegative");
        lv[i] = values[i] > 0.0 ? std::log(values[i]) : kNegInf;
    }
    return from_log(grid, std::move(lv), check_tails);
}

std::vector<double> GridDensity::values() const {
    std::vector<double> v(log_.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = std::exp(log_[i]);
    return v;
}

std::vector<double> GridDensity::half_log() const {
    return std::vector<double>(log_.begin() + grid_.center(), log_.end());
}

double GridDensity::value(int i) const { return std::exp(log_[i]); }

double GridDensity::log_at(double s) const {
    return interp_log(log_.data(), grid_.half_width, 1.0 / grid_.spacing(), grid_.n, s);
}

double GridDensity::at(double s) const { return std::exp(log_at(s)); }

double LogTail::operator()(double s) const {
    if (!active) return -std::numeric_limits<double>::infinity();
    return c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * c[4])));
}

void LogTail::taylor(double x0, double d[5]) const {
    d[4] = c[4];
    d[3] = c[3] + 4.0 * c[4] * x0;
    d[2] = c[2] + x0 * (3.0 * c[3] + 6.0 * c[4] * x0);
    d[1] = c[1] + x0 * (2.0 * c[2] + x0 * (3.0 * c[3] + 4.0 * c[4] * x0));
    d[0] = (*this)(x0);
}

LogTail fit_log_tail(const GridSpec& g, const std::vector<double>& lv, double depth, bool even) {
    double mx = *std::max_element(lv.begin(), lv.end());
    std::vector<int> rows;
    for (int i = 0; i <= g.n; ++i) {
        if (lv[i] >= mx - depth) rows.push_back(i);
    }
    LogTail t;
    if (rows.size() < 8) return t;
    // Scaled basis keeps the least squares problem well conditioned.
    const double L = g.half_width;
    auto fit = [&](const std::vector<int>& powers) {
        Eigen::MatrixXd A(rows.size(), powers.size());
        Eigen::VectorXd b(rows.size());
        for (size_t k = 0; k < rows.size(); ++k) {
            double x = g.node(rows[k]) / L;
            for (size_t j = 0; j < powers.size(); ++j) A(k, j) = std::pow(x, powers[j]);
            b(k) = lv[rows[k]];
        }
        Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
        LogTail r;
        for (size_t j = 0; j < powers.size(); ++j) r.c[powers[j]] = sol(j) / std::pow(L, powers[j]);
        return r;
    };
    t = fit(even ? std::vector<int>{0, 2, 4} : std::vector<int>{0, 1, 2, 3, 4});
    t.active = t.c[4] < 0.0;
    if (!t.active) {
        // A quartic that does not confine is noise on a Gaussian.
        t = fit(even ? std::vector<int>{0, 2} : std::vector<int>{0, 1, 2});
        t.active = t.c[2] < 0.0;
    }
    return t;
}

LogTail fit_log_tail(const GridDensity& p, double depth) {
    return fit_log_tail(p.grid(), p.log_values(), depth, true);
}

GridDensity gaussian_density(double tau, const GridSpec& grid) {
    if (!(tau > 0.0)) throw DomainError("Gaussian variance must be positive");
    if (!(grid.half_width > 8.0 * std::sqrt(tau))) {
        throw TailContainmentError("grid half-width must exceed 8 sqrt(tau)");
    }
    std::vector<double> lv(grid.n + 1);
    double c = -0.5 * std::log(2.0 * std::numbers::pi * tau);
    for (int i = 0; i <= grid.n; ++i) {
        double s = grid.node(i);
        lv[i] = c - s * s / (2.0 * tau);
    }
    int m = grid.center();
    for (int i = 0; i < m; ++i) lv[i] = lv[grid.n - i];
    return GridDensity::from_log(grid, std::move(lv));
}

double moments(const GridDensity& p, int k) {
    if (k < 0) throw DomainError("moment order must be nonnegative");
    if (k % 2 == 1) return 0.0;
    const GridSpec& g = p.grid();
    std::vector<double> f(g.n + 1);
    for (int i = 0; i <= g.n; ++i) f[i] = std::pow(g.node(i), k) * p.value(i);
    return trapezoid(g, f);
}

double variance(const GridDensity& p) { return moments(p, 2); }

double excess_kurtosis(const GridDensity& p) {
    double m2 = moments(p, 2);
    return moments(p, 4) / (m2 * m2) - 3.0;
}

double fourth_cumulant(const GridDensity& p) {
    double m2 = moments(p, 2);
    return moments(p, 4) - 3.0 * m2 * m2;
}

double l1_distance(const GridDensity& p, const GridDensity& q) {
    if (!(p.grid() == q.grid())) throw DomainError("densities live on different grids");
    const GridSpec& g = p.grid();
    std::vector<double> f(g.n + 1);
    for (int i = 0; i <= g.n; ++i) f[i] = std::fabs(p.value(i) - q.value(i));
    return trapezoid(g, f);
}

double edge_mass(const GridDensity& p, int cells) {
    const GridSpec& g = p.grid();
    auto w = trapezoid_weights(g);
    double m = 0.0;
    for (int i = 0; i <= cells && i <= g.n; ++i) {
        m += w[i] * p.value(i) + w[g.n - i] * p.value(g.n - i);
    }
    return m;
}

double hermite_physicists(int k, double x) {
    if (k < 0) throw DomainError("Hermite degree must be nonnegative");
    if (k == 0) return 1.0;
    double hm = 1.0, h = 2.0 * x;
    for (int j = 1; j < k; ++j) {
        double hn = 2.0 * x * h - 2.0 * j * hm;
        hm = h;
        h = hn;
    }
    return h;
}

double hermite_G(int j, double s, double gamma) {
    if (j < 0 || j > 12) throw DomainError("hermite_G supports 0 <= j <= 12");
    return hermite_physicists(2 * j, gamma * s);
}

double hermite_G(int j, double s, const ModelParams& params) {
    return hermite_G(j, s, params.gamma_scale);
}

namespace {

Eigen::MatrixXd basis_matrix(const GridSpec& g, int M, double gamma) {
    Eigen::MatrixXd B(g.n + 1, M);
    for (int i = 0; i <= g.n; ++i) {
        for (int j = 0; j < M; ++j) B(i, j) = hermite_G(j, g.node(i), gamma);
    }
    return B;
}

double condition_of(const Eigen::MatrixXd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

Eigen::MatrixXd normalized(const Eigen::MatrixXd& G) {
    Eigen::VectorXd d = G.diagonal().cwiseSqrt().cwiseInverse();
    return d.asDiagonal() * G * d.asDiagonal();
}

GramDiagnostics diagnose(const Eigen::MatrixXd& G) {
    Eigen::MatrixXd Gn = normalized(G);
    GramDiagnostics out;
    out.condition_number = condition_of(Gn);
    for (int m = 0; m < Gn.rows(); ++m) {
        for (int n = 0; n < Gn.cols(); ++n) {
            if (m != n) out.max_offdiag = std::max(out.max_offdiag, std::fabs(Gn(m, n)));
        }
    }
    return out;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& B, const std::vector<double>& w) {
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    return B.transpose() * wv.asDiagonal() * B;
}

}  // namespace

GramDiagnostics gram_diagnostics(const GridSpec& grid, int M, double gamma) {
    auto w = trapezoid_weights(grid);
    for (int i = 0; i <= grid.n; ++i) {
        double s = grid.node(i);
        w[i] *= std::exp(-gamma * gamma * s * s);
    }
    return diagnose(weighted_gram(basis_matrix(grid, M, gamma), w));
}

GramDiagnostics gram_diagnostics_inverse_weight(const GridSpec& grid, int M,
                                                const ModelParams& params, double gamma) {
    auto w = trapezoid_weights(grid);
    for (int i = 0; i <= grid.n; ++i) {
        double s = grid.node(i);
        w[i] *= std::exp(-s * s / (2.0 * params.sigma)) /
                std::sqrt(2.0 * std::numbers::pi * params.sigma);
    }
    return diagnose(weighted_gram(basis_matrix(grid, M, gamma), w));
}

HermiteCoeffs project_values(const GridSpec& grid, const std::vector<double>& f, int M,
                             const ModelParams& params, double gamma) {
    if (M < 2) throw DomainError("projection needs at least two coefficients");
    if (M > 13) throw DomainError("projection supports at most 13 coefficients");
    if (static_cast<int>(f.size()) != grid.n + 1) {
        throw DomainError("function length does not match the grid");
    }
    // Reduced function h = f / p*_0 against the weight e^{-gamma^2 s^2}.
    double sig = params.sigma;
    double lnorm = 0.5 * std::log(2.0 * std::numbers::pi * sig);
    auto w = trapezoid_weights(grid);
    Eigen::VectorXd hw(grid.n + 1);
    for (int i = 0; i <= grid.n; ++i) {
        double s = grid.node(i);
        double lw = std::log(w[i]) - gamma * gamma * s * s;
        w[i] = std::exp(lw);
        hw(i) = f[i] * std::exp(s * s / (2.0 * sig) + lnorm + lw);
    }
    Eigen::MatrixXd B = basis_matrix(grid, M, gamma);
    Eigen::MatrixXd G = weighted_gram(B, w);
    Eigen::VectorXd b = B.transpose() * hw;
    if (!b.allFinite()) throw IllConditioned("projection integrals are not finite");

    Eigen::VectorXd d = G.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd Gn = d.asDiagonal() * G * d.asDiagonal();
    double cond = condition_of(Gn);
    if (cond > 1e12) {
        throw IllConditioned("Gram condition number " + std::to_string(cond) +
                             " exceeds 1e12");
    }
    Eigen::VectorXd c = d.asDiagonal() * Gn.ldlt().solve(d.asDiagonal() * b);

    HermiteCoeffs out;
    out.params = params;
    out.gamma = gamma;
    out.coeffs.assign(c.data(), c.data() + c.size());
    return out;
}

HermiteCoeffs project_to_hermite(const GridDensity& p, int M, const ModelParams& params,
                                 double gamma) {
    return project_values(p.grid(), p.values(), M, params, gamma);
}

HermiteCoeffs project_to_hermite(const GridDensity& p, int M, const ModelParams& params) {
    return project_to_hermite(p, M, params, params.gamma_scale);
}

std::vector<double> reconstruct(const HermiteCoeffs& c, const GridSpec& grid) {
    double sig = c.params.sigma;
    std::vector<double> out(grid.n + 1);
    for (int i = 0; i <= grid.n; ++i) {
        double s = grid.node(i);
        double sum = 0.0;
        for (size_t j = 0; j < c.coeffs.size(); ++j) {
            sum += c.coeffs[j] * hermite_G(static_cast<int>(j), s, c.gamma);
        }
        out[i] = sum * std::exp(-s * s / (2.0 * sig)) / std::sqrt(2.0 * std::numbers::pi * sig);
    }
    return out;
}

}  // namespace dyson
