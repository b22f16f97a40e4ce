#include "dyson/rgflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyson/error.hpp"
#include "dyson/interp.hpp"
#include "dyson/parallel.hpp"

namespace dyson {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEdgeLimit = 1e-12;

}  // namespace

BlockOutput block_step_raw(const GridDensity& p, BlockCoupling bc, const LogTail* tail) {
    if (!(bc.beta >= 0.0) || !std::isfinite(bc.beta)) {
        throw DomainError("block coupling beta must be finite and nonnegative");
    }
    if (!(bc.ratio > 0.0) || !std::isfinite(bc.ratio)) {
        throw DomainError("block ratio must be positive");
    }
    const GridSpec& g = p.grid();
    const int K = g.half_size();
    const double h = g.spacing();
    const double L = g.half_width;
    const double inv_h = 1.0 / h;
    const double* lv = p.log_values().data();
    const double log_h = std::log(h);
    const double log_2h = std::log(2.0 * h);
    const bool extend = tail != nullptr && tail->active;

    // The integrand is even in t: fold onto t in [0, L].
    BlockOutput out;
    out.half_log.assign(K, kNegInf);
    parallel_for(K, [&](int i) {
        double y = i * h;
        double u = 0.5 * bc.ratio * y;
        std::vector<double> terms;
        terms.reserve(K);
        double mx = kNegInf;
        for (int j = 0; j < K; ++j) {
            double t = j * h;
            if (u + t > L * (1.0 + 1e-14) && !extend) break;
            auto at = [&](double x) {
                return std::fabs(x) <= L * (1.0 + 1e-14) ? interp_log(lv, L, inv_h, g.n, x)
                                                          : (*tail)(x);
            };
            double a = at(u + t);
            double b = at(u - t);
            double w = (j == 0 || j == K - 1) ? log_h : log_2h;
            double term = a + b - bc.beta * t * t + w;
            terms.push_back(term);
            mx = std::max(mx, term);
        }
        if (mx == kNegInf) return;
        double sum = 0.0;
        for (double x : terms) sum += std::exp(x - mx);
        out.half_log[i] = bc.beta * u * u + mx + std::log(sum);
    });

    std::vector<double> full(g.n + 1);
    int c = g.center();
    for (int i = 0; i < K; ++i) full[c + i] = full[c - i] = out.half_log[i];
    out.log_mass = log_trapezoid(g, full);
    return out;
}

GridDensity block_step(const GridDensity& p, BlockCoupling bc, const LogTail* tail) {
    BlockOutput raw = block_step_raw(p, bc, tail);
    if (!std::isfinite(raw.log_mass)) {
        throw NormalizerDivergence("block integral has no finite normalizer");
    }
    for (double& x : raw.half_log) x -= raw.log_mass;
    double edge = std::exp(raw.half_log.back());
    if (!(edge < kEdgeLimit)) {
        throw NormalizerDivergence("normalized output at the grid edge is " +
                                   std::to_string(edge));
    }
    return GridDensity::from_half_log(p.grid(), raw.half_log);
}

GridDensity rg_step(const GridDensity& p, const ModelParams& params) {
    return block_step(p, {1.0, params.block_ratio()});
}

GridDensity rg_step_general_beta(const GridDensity& p, double beta, const ModelParams& params) {
    return block_step(p, {beta, params.block_ratio()});
}

double gaussian_variance_map(double v, const ModelParams& params) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError("variance map needs 0 < v < 1");
    return std::pow(2.0, 1.0 - params.a) * v / (1.0 - v);
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::ConvergedToFixedPoint: return "ConvergedToFixedPoint";
        case Classification::CollapsedHighT: return "CollapsedHighT";
        case Classification::EscapedLowT: return "EscapedLowT";
        case Classification::Undecided: return "Undecided";
    }
    return "Undecided";
}

double peak_location(const GridDensity& p) {
    const GridSpec& g = p.grid();
    const auto& lv = p.log_values();
    int c = g.center();
    int best = c;
    for (int i = c; i <= g.n; ++i) {
        if (lv[i] > lv[best]) best = i;
    }
    if (best == c) return 0.0;
    if (best == g.n) return g.node(best);
    double l0 = lv[best - 1], l1 = lv[best], l2 = lv[best + 1];
    double den = l0 - 2.0 * l1 + l2;
    double off = den < 0.0 ? 0.5 * (l0 - l2) / den : 0.0;
    if (!std::isfinite(off) || std::fabs(off) > 1.0) off = 0.0;
    return g.node(best) + off * g.spacing();
}

namespace {

FlowStep summarize(int m, const GridDensity& p, const GridDensity& target) {
    FlowStep s;
    s.m = m;
    double m2 = moments(p, 2);
    double m4 = moments(p, 4);
    s.variance = m2;
    s.kurtosis = m4 / (m2 * m2) - 3.0;
    s.fourth_cumulant = m4 - 3.0 * m2 * m2;
    s.l1_to_fp = l1_distance(p, target);
    s.peak = peak_location(p);
    return s;
}

}  // namespace

FlowTrace flow(const GridDensity& p0, const GridDensity& target, const ModelParams& params,
               int m_max, const FlowOptions& opt) {
    if (m_max < 1) throw DomainError("flow needs m_max >= 1");
    FlowTrace tr;
    tr.params = params;
    const double sigma_ref = variance(target);

    GridDensity p = p0;
    FlowStep s0 = summarize(0, p, target);
    tr.iterates.push_back(s0);
    tr.min_l1 = s0.l1_to_fp;
    tr.stay_steps = s0.l1_to_fp < opt.stay_radius ? 1 : 0;
    tr.final_density = p;

    auto finish = [&](Classification c) {
        tr.classification = c;
        tr.iterates.back().classification = c;
        tr.final_density = p;
        return tr;
    };
    if (opt.stop_at_fixed_point && s0.l1_to_fp < opt.fixed_point_tol) {
        return finish(Classification::ConvergedToFixedPoint);
    }

    int below = 0;
    for (int m = 1; m <= m_max; ++m) {
        try {
            p = rg_step(p, params);
        } catch (const NormalizerDivergence&) {
            return finish(Classification::EscapedLowT);
        } catch (const TailContainmentError&) {
            return finish(Classification::EscapedLowT);
        }
        tr.steps = m;
        FlowStep s = summarize(m, p, target);
        tr.iterates.push_back(s);
        tr.min_l1 = std::min(tr.min_l1, s.l1_to_fp);
        if (s.l1_to_fp < opt.stay_radius) ++tr.stay_steps;

        if (opt.stop_at_fixed_point && s.l1_to_fp < opt.fixed_point_tol) {
            return finish(Classification::ConvergedToFixedPoint);
        }
        below = s.variance < opt.collapse_ratio * sigma_ref ? below + 1 : 0;
        if (below >= opt.collapse_steps) return finish(Classification::CollapsedHighT);
        if (s.variance > opt.escape_ratio * sigma_ref ||
            edge_mass(p, opt.edge_cells) > opt.edge_mass_limit) {
            return finish(Classification::EscapedLowT);
        }
    }
    return finish(Classification::Undecided);
}

FlowTrace flow(const GridDensity& p0, const ModelParams& params, int m_max,
               const FlowOptions& opt) {
    GridSpec g = p0.grid();
    return flow(p0, gaussian_density(params.sigma, g), params, m_max, opt);
}

GridDensity rescale_to_clt(const GridDensity& p, int n, const ModelParams& params) {
    if (n < 0) throw DomainError("level must be nonnegative");
    if (n == 0) return p;
    const GridSpec& g = p.grid();
    double k = std::pow(2.0, n * (params.a - 1.0) / 2.0);
    double lk = std::log(k);
    std::vector<double> lv(g.n + 1);
    int c = g.center();
    for (int i = c; i <= g.n; ++i) {
        lv[i] = p.log_at(g.node(i) / k) - lk;
        lv[2 * c - i] = lv[i];
    }
    double lost = 1.0 - std::exp(log_trapezoid(g, lv));
    if (lost > 1e-10) {
        throw ResolutionLoss("rescaled density leaves the grid (lost mass " +
                             std::to_string(lost) + ")");
    }
    try {
        return GridDensity::from_log(g, std::move(lv));
    } catch (const TailContainmentError& e) {
        throw ResolutionLoss(std::string("rescaled density reaches the grid edge: ") + e.what());
    }
}

double density_extent(const GridDensity& p, double drop) {
    const GridSpec& g = p.grid();
    const auto& lv = p.log_values();
    int c = g.center();
    double mx = *std::max_element(lv.begin() + c, lv.end());
    for (int i = g.n; i >= c; --i) {
        if (lv[i] >= mx - drop) return g.node(i);
    }
    return 0.0;
}

FramedDensity framed_start(const GridDensity& p0) {
    FramedDensity f;
    f.density = p0;
    return f;
}

FramedDensity framed_step(const FramedDensity& st, const ModelParams& params,
                          const FrameOptions& opt) {
    const GridSpec& g = st.density.grid();
    const double L = g.half_width;
    double beta = std::exp2(st.log2_beta);
    double r = st.last_ratio > 0.0 ? st.last_ratio : params.block_ratio();
    LogTail tail;
    if (opt.extrapolate_tails) tail = fit_log_tail(st.density);
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        GridDensity out;
        try {
            out = block_step(st.density, {beta, r}, &tail);
        } catch (const NormalizerDivergence&) {
            r *= 2.0;
            continue;
        } catch (const TailContainmentError&) {
            r *= 2.0;
            continue;
        }
        double e = density_extent(out, opt.drop);
        if (e < 2.0 * g.spacing()) {
            r /= 8.0;
            continue;
        }
        if (e >= opt.low * L && e <= opt.high * L) {
            FramedDensity next;
            next.density = std::move(out);
            next.level = st.level + 1;
            next.log2_scale = st.log2_scale + std::log2(r);
            next.log2_beta = st.log2_beta + 2.0 * std::log2(r) - params.a;
            next.last_ratio = r;
            return next;
        }
        r *= e / (opt.target * L);
    }
    throw ResolutionLoss("no block ratio keeps the density on the grid");
}

}  // namespace dyson
