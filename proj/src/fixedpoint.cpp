#include "dyson/fixedpoint.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dyson/error.hpp"
#include "dyson/interp.hpp"
#include "dyson/parallel.hpp"
#include "dyson/rgflow.hpp"

namespace dyson {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

GridDensity gaussian_fixed_point(const ModelParams& params, const GridSpec& grid) {
    return gaussian_density(params.sigma, grid);
}

GridDensity ansatz_density(const ModelParams& params, const GridSpec& grid, double c) {
    double gt = params.eigen_gamma_scale();
    GridDensity p0 = gaussian_fixed_point(params, grid);
    std::vector<double> lv = p0.log_values();
    for (int i = 0; i <= grid.n; ++i) {
        lv[i] -= c * params.epsilon * hermite_G(2, grid.node(i), gt);
    }
    return GridDensity::from_log(grid, std::move(lv));
}

double g4_residual_component(const GridDensity& p, const ModelParams& params) {
    const GridSpec& g = p.grid();
    GridDensity r = rg_step(p, params);
    double gt = params.eigen_gamma_scale();
    auto w = trapezoid_weights(g);
    double sum = 0.0;
    for (int i = 0; i <= g.n; ++i) {
        double s = g.node(i);
        double d = r.log_values()[i] - p.log_values()[i];
        sum += w[i] * d * hermite_G(2, s, gt) * std::exp(-gt * gt * s * s);
    }
    // H4 has squared norm 384 sqrt(pi) / gt under this weight.
    return sum * gt / (384.0 * std::sqrt(std::numbers::pi));
}

EpsilonSeed epsilon_seed(const ModelParams& params, const GridSpec& grid) {
    double eps = params.epsilon;
    if (eps < 0.0 || eps > 0.1) {
        throw DomainError("epsilon seed needs 0 <= a - 3/2 <= 0.1");
    }
    if (eps == 0.0) return {gaussian_fixed_point(params, grid), 0.0};

    auto f = [&](double c) { return g4_residual_component(ansatz_density(params, grid, c), params); };
    // Geometric scan of (0, 10] for the first sign change, then bisection.
    const int scan = 48;
    double lo = 1e-3, flo = f(lo);
    double hi = 0.0;
    bool found = false;
    for (int k = 1; k <= scan; ++k) {
        double c = 1e-3 * std::pow(1e4, static_cast<double>(k) / scan);
        double fc = f(c);
        if ((flo < 0.0) != (fc < 0.0)) {
            hi = c;
            found = true;
            break;
        }
        lo = c;
        flo = fc;
    }
    if (!found) throw NoSignChange("G4 residual component keeps one sign on (0, 10]");
    for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double c = 0.5 * (lo + hi);
    return {ansatz_density(params, grid, c), c};
}

LogMapJacobian log_map_jacobian(const GridDensity& p, const ModelParams& params) {
    const GridSpec& g = p.grid();
    const int K = g.half_size();
    const int c = g.center();
    const double h = g.spacing();
    const double L = g.half_width;
    const double inv_h = 1.0 / h;
    const double r = params.block_ratio();
    const double* lv = p.log_values().data();
    const double log_h = std::log(h), log_2h = std::log(2.0 * h);

    LogMapJacobian out;
    out.half_log.assign(K, kNegInf);
    out.jacobian.assign(static_cast<size_t>(K) * K, 0.0);
    parallel_for(K, [&](int i) {
        double u = 0.5 * r * i * h;
        std::vector<double> terms;
        std::vector<Stencil> plus, minus;
        double mx = kNegInf;
        for (int j = 0; j < K; ++j) {
            double t = j * h;
            Stencil sp, sm;
            if (!lagrange_stencil(u + t, L, inv_h, g.n, sp)) break;
            lagrange_stencil(u - t, L, inv_h, g.n, sm);
            double a = interp_log(lv, L, inv_h, g.n, u + t);
            double b = interp_log(lv, L, inv_h, g.n, u - t);
            double term = a + b - t * t + ((j == 0 || j == K - 1) ? log_h : log_2h);
            terms.push_back(term);
            plus.push_back(sp);
            minus.push_back(sm);
            mx = std::max(mx, term);
        }
        if (mx == kNegInf) return;
        double sum = 0.0;
        for (double x : terms) sum += std::exp(x - mx);
        out.half_log[i] = u * u + mx + std::log(sum);
        double* row = out.jacobian.data() + static_cast<size_t>(i) * K;
        for (size_t j = 0; j < terms.size(); ++j) {
            double pi = std::exp(terms[j] - mx) / sum;
            if (pi == 0.0) continue;
            for (int o = 0; o < 4; ++o) {
                row[std::abs(plus[j].k - 1 + o - c)] += pi * plus[j].c[o];
                row[std::abs(minus[j].k - 1 + o - c)] += pi * minus[j].c[o];
            }
        }
    });

    // Normalization: subtract d log Z, with Z the trapezoid mass of the output.
    std::vector<double> full(g.n + 1);
    for (int i = 0; i < K; ++i) full[c + i] = full[c - i] = out.half_log[i];
    double lz = log_trapezoid(g, full);
    auto w = trapezoid_weights(g);
    std::vector<double> q(K);
    for (int i = 0; i < K; ++i) {
        q[i] = w[c + i] * std::exp(full[c + i] - lz) * (i == 0 ? 1.0 : 2.0);
    }
    std::vector<double> dz(K, 0.0);
    for (int i = 0; i < K; ++i) {
        const double* row = out.jacobian.data() + static_cast<size_t>(i) * K;
        for (int k = 0; k < K; ++k) dz[k] += q[i] * row[k];
    }
    for (int i = 0; i < K; ++i) {
        out.half_log[i] -= lz;
        double* row = out.jacobian.data() + static_cast<size_t>(i) * K;
        for (int k = 0; k < K; ++k) row[k] -= dz[k];
    }
    return out;
}

FixedPointResult solve_fixed_point(const GridDensity& seed, const ModelParams& params,
                                   const NewtonOptions& opt, double seed_c) {
    auto residual_of = [&](const GridDensity& p) { return l1_distance(rg_step(p, params), p); };

    FixedPointResult res;
    res.c = seed_c;
    GridDensity x = seed;
    double rx = residual_of(x);
    if (!(rx < 0.1)) {
        throw DomainError("seed residual " + std::to_string(rx) + " is not below 0.1");
    }
    res.newton_trace.push_back({0, rx, 0.0});
    GridDensity best = x;
    double best_r = rx;
    const GridSpec& g = seed.grid();
    const int K = g.half_size();

    for (int step = 1; step <= opt.max_steps && rx >= opt.polish; ++step) {
        LogMapJacobian jm = log_map_jacobian(x, params);
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(
            jm.jacobian.data(), K, K);
        std::vector<double> xh = x.half_log();
        Eigen::VectorXd F(K);
        for (int i = 0; i < K; ++i) F(i) = jm.half_log[i] - xh[i];
        Eigen::MatrixXd A = J - Eigen::MatrixXd::Identity(K, K);
        Eigen::VectorXd dx = A.partialPivLu().solve(-F);

        double lam = 1.0;
        bool improved = false;
        GridDensity trial;
        double rt = 0.0;
        for (int hv = 0; hv <= opt.max_halvings; ++hv, lam *= 0.5) {
            std::vector<double> xn(K);
            for (int i = 0; i < K; ++i) xn[i] = xh[i] + lam * dx(i);
            try {
                trial = GridDensity::from_half_log(g, xn);
                rt = residual_of(trial);
            } catch (const Error&) {
                continue;
            }
            if (rt < rx) {
                improved = true;
                break;
            }
        }
        if (!improved) {
            res.newton_trace.push_back({step, rx, 0.0});
            break;
        }
        x = trial;
        rx = rt;
        res.newton_trace.push_back({step, rx, lam});
        if (rx < best_r) {
            best = x;
            best_r = rx;
        }
        int n = static_cast<int>(res.newton_trace.size());
        if (n > opt.stall_window && rx >= opt.tolerance) {
            double before = res.newton_trace[n - 1 - opt.stall_window].residual;
            if (rx > (1.0 - opt.stall_reduction) * before) break;
        }
    }
    res.density = best;
    res.residual_l1 = best_r;
    res.status = best_r < opt.tolerance ? SolveStatus::Converged : SolveStatus::Stalled;
    return res;
}

TailBound fit_tail_bound(const GridDensity& p, const ModelParams& params) {
    const GridSpec& g = p.grid();
    double eps = params.epsilon;
    if (!(eps > 0.0)) throw DomainError("tail bound needs epsilon > 0");
    GridDensity p0 = gaussian_fixed_point(params, g);
    // c0: smallest decay rate of log(p / p*_0) / (eps s^4) on the far tail.
    double s_tail = 5.0 * std::sqrt(params.sigma);
    double c0 = std::numeric_limits<double>::infinity();
    for (int i = g.center(); i <= g.n; ++i) {
        double s = g.node(i);
        double d = p.log_values()[i] - p0.log_values()[i];
        if (s < s_tail || !std::isfinite(d)) continue;
        c0 = std::min(c0, -d / (eps * s * s * s * s));
    }
    if (!std::isfinite(c0)) throw DomainError("grid too narrow to fit the tail bound");
    TailBound tb;
    tb.c0 = c0;
    double lc = kNegInf;
    for (int i = 0; i <= g.n; ++i) {
        double s = g.node(i);
        double d = p.log_values()[i] - p0.log_values()[i];
        lc = std::max(lc, d + c0 * eps * s * s * s * s);
    }
    tb.C0 = std::exp(lc);
    for (int i = 0; i <= g.n; ++i) {
        double s = g.node(i);
        double lb = lc + p0.log_values()[i] - c0 * eps * s * s * s * s;
        tb.worst_ratio = std::max(tb.worst_ratio, std::exp(p.log_values()[i] - lb));
    }
    return tb;
}

}  // namespace dyson
