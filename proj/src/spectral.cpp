#include "dyson/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "dyson/error.hpp"
#include "dyson/interp.hpp"
#include "dyson/parallel.hpp"
#include "dyson/rgflow.hpp"

namespace dyson {

std::vector<double> LinearizedOperator::apply(const std::vector<double>& full) const {
    const GridSpec& g = base_point.grid();
    if (static_cast<int>(full.size()) != g.n + 1) throw DomainError("function length mismatch");
    int c = g.center(), K = g.half_size();
    Eigen::VectorXd v(K);
    for (int i = 0; i < K; ++i) v(i) = 0.5 * (full[c + i] + full[c - i]);
    Eigen::VectorXd w = matrix * v;
    std::vector<double> out(g.n + 1);
    for (int i = 0; i < K; ++i) out[c + i] = out[c - i] = w(i);
    return out;
}

LinearizedOperator build_linearization(const GridDensity& base, const ModelParams& params,
                                       double residual_tol) {
    const GridSpec& g = base.grid();
    double res = l1_distance(rg_step(base, params), base);
    if (!(res < residual_tol)) {
        throw NotAFixedPoint("base density has residual " + std::to_string(res));
    }
    const int K = g.half_size();
    const int c = g.center();
    const double h = g.spacing();
    const double L = g.half_width;
    const double inv_h = 1.0 / h;
    const double r = params.block_ratio();
    const double* lv = base.log_values().data();
    const double log_z = block_step_raw(base, {1.0, r}).log_mass;
    const auto w = trapezoid_weights(g);

    // Entry weights are the map's integrand at the base point times d log p.
    LinearizedOperator op;
    op.matrix = Eigen::MatrixXd::Zero(K, K);
    parallel_for(K, [&](int i) {
        double u = 0.5 * r * i * h;
        for (int j = 0; j <= g.n; ++j) {
            double t = g.node(j);
            Stencil st;
            if (!lagrange_stencil(u + t, L, inv_h, g.n, st)) continue;
            double lb = interp_log(lv, L, inv_h, g.n, u - t);
            double lc = interp_log(lv, L, inv_h, g.n, u + t);
            double lk = std::log(2.0 * w[j]) + u * u - t * t + lb + lc - log_z;
            if (!std::isfinite(lk)) continue;
            for (int o = 0; o < 4; ++o) {
                int m = st.k - 1 + o;
                if (!std::isfinite(lv[m])) continue;
                double coef = st.c[o] * std::exp(lk - lv[m]);
                op.matrix(i, std::abs(m - c)) += coef;
            }
        }
    });
    op.base_point = base;
    op.params = params;
    op.normalizer = std::exp(log_z);
    op.base_residual = res;
    return op;
}

Spectrum eigen_spectrum(const LinearizedOperator& op, int k) {
    if (k < 1 || k > 10) throw DomainError("eigen_spectrum supports 1 <= k <= 10");
    const Eigen::MatrixXd& A = op.matrix;
    const int K = static_cast<int>(A.rows());
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue iteration failed");
    Eigen::VectorXcd ev = es.eigenvalues();
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return std::abs(ev(x)) > std::abs(ev(y)); });

    const GridSpec& g = op.base_point.grid();
    int c = g.center();
    Spectrum sp;
    for (int q = 0; q < std::min(k, K); ++q) {
        std::complex<double> lam = ev(order[q]);
        double lr = lam.real();
        // Inverse iteration with a slightly perturbed shift.
        double shift = lr + 1e-10 * std::max(1.0, std::fabs(lr));
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A - shift * Eigen::MatrixXd::Identity(K, K));
        Eigen::VectorXd v = Eigen::VectorXd::Ones(K);
        for (int i = 0; i < K; ++i) v(i) += 1e-3 * std::cos(0.37 * i);
        double resid = 0.0;
        for (int it = 0; it < 20; ++it) {
            v = lu.solve(v);
            v.normalize();
            resid = (A * v - lr * v).norm();
            if (resid < 1e-12) break;
        }
        std::vector<double> e(g.n + 1);
        for (int i = 0; i < K; ++i) e[c + i] = e[c - i] = v(i);
        double norm = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
        double sign = (e[c] < -1e-12 * norm) ? -1.0 : 1.0;
        for (double& x : e) x *= sign / norm;
        sp.eigenvalues.push_back(lr);
        sp.imag_parts.push_back(lam.imag());
        sp.eigenfunctions.push_back(std::move(e));
        sp.residuals.push_back(resid);
    }
    return sp;
}

CriticalExponents exponents_from_spectrum(double lambda1, const ModelParams& params) {
    if (!(lambda1 > 1.0)) throw DomainError("exponents need lambda1 > 1");
    double l = std::log2(lambda1);
    return {(params.a - 1.0) / l, (2.0 - params.a) / (2.0 * l)};
}

double gaussian_eigenvalue(int j, const ModelParams& params) {
    return std::pow(2.0, 1.0 - (2.0 - params.a) * j);
}

std::vector<double> gaussian_eigenfunction(int j, const GridSpec& grid, const ModelParams& params,
                                           double gamma) {
    std::vector<double> e(grid.n + 1);
    double sig = params.sigma;
    for (int i = 0; i <= grid.n; ++i) {
        double s = grid.node(i);
        e[i] = hermite_G(j, s, gamma) * std::exp(-s * s / (2.0 * sig)) /
               std::sqrt(2.0 * std::numbers::pi * sig);
    }
    return e;
}

double cosine_similarity(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("vectors differ in length");
    double xy = 0, xx = 0, yy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        xy += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    return xy / std::sqrt(xx * yy);
}

}  // namespace dyson
