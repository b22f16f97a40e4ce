#include "dyson/critparam.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyson/error.hpp"
#include "dyson/fixedpoint.hpp"
#include "dyson/interp.hpp"
#include "dyson/parallel.hpp"

namespace dyson {

const char* to_string(BaseKind k) {
    return k == BaseKind::Gaussian ? "gaussian" : "non-gaussian";
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::HighT: return "high";
        case Regime::LowT: return "low";
        case Regime::Unresolved: return "unresolved";
    }
    return "unresolved";
}

DensityFamily default_family(const ModelParams& params, const GridDensity& non_gaussian_base) {
    DensityFamily fam;
    fam.params = params;
    fam.gamma = params.gamma_scale;
    fam.b2_slope = 1.0;
    fam.b2_offset = 0.0;
    if (params.a <= 1.5) {
        fam.kind = BaseKind::Gaussian;
        fam.base = gaussian_fixed_point(params, non_gaussian_base.grid());
        fam.b4 = -0.01;
        fam.t_lo = -0.2;
        fam.t_hi = 0.2;
    } else {
        double eps = params.epsilon;
        double half = 0.5 * std::pow(eps, 1.5);
        fam.kind = BaseKind::NonGaussian;
        fam.base = non_gaussian_base;
        fam.b4 = -eps * eps;
        fam.t_lo = -half;
        fam.t_hi = half;
    }
    return fam;
}

DensityFamily default_family(const ModelParams& params, const GridSpec& grid) {
    if (params.a <= 1.5) return default_family(params, gaussian_fixed_point(params, grid));
    EpsilonSeed seed = epsilon_seed(params, grid);
    FixedPointResult fp = solve_fixed_point(seed.density, params, {}, seed.c);
    if (fp.status != SolveStatus::Converged) {
        throw ConvergenceError("non-Gaussian fixed point did not converge");
    }
    return default_family(params, fp.density);
}

GridDensity family_density(const DensityFamily& fam, double t) {
    if (fam.custom) return fam.custom(t);
    const GridSpec& g = fam.base.grid();
    std::vector<double> lv = fam.base.log_values();
    double b2 = fam.b2(t);
    for (int i = 0; i <= g.n; ++i) {
        double s = g.node(i);
        lv[i] += b2 * hermite_G(1, s, fam.gamma) + fam.b4 * hermite_G(2, s, fam.gamma);
    }
    return GridDensity::from_log(g, std::move(lv));
}

namespace {

ProbeRecord probe(const DensityFamily& fam, double t, int m_max) {
    FlowOptions opt;
    opt.stop_at_fixed_point = false;
    ProbeRecord rec;
    rec.t = t;
    GridDensity p;
    try {
        p = family_density(fam, t);
    } catch (const TailContainmentError&) {
        rec.classification = Classification::EscapedLowT;
        return rec;
    }
    FlowTrace tr = flow(p, fam.base, fam.params, m_max, opt);
    rec.classification = tr.classification;
    rec.steps = tr.steps;
    rec.min_l1 = tr.min_l1;
    rec.stay_steps = tr.stay_steps;
    return rec;
}

bool decided(Classification c) {
    return c == Classification::CollapsedHighT || c == Classification::EscapedLowT;
}

}  // namespace

CriticalSearchResult critical_search(const DensityFamily& fam, int m_max, double tol_t) {
    double t1 = fam.t_lo, t2 = fam.t_hi;
    double width0 = t2 - t1;
    if (!(width0 > 0.0)) throw DomainError("family range must have t_lo < t_hi");
    if (m_max < 1) throw DomainError("critical search needs m_max >= 1");
    if (!(tol_t >= 1e-14 * width0)) throw DomainError("tol_t below 1e-14 of the range width");
    double tol = std::max(tol_t, 1e-13 * width0);

    CriticalSearchResult res;
    res.fixed_point_used = fam.kind;
    res.m_used = m_max;

    ProbeRecord lo, hi;
    {
        std::vector<ProbeRecord> ends(2);
        parallel_for(2, [&](int k) { ends[k] = probe(fam, k == 0 ? t1 : t2, m_max); });
        lo = ends[0];
        hi = ends[1];
    }
    res.probes.push_back(lo);
    res.probes.push_back(hi);
    if (!decided(lo.classification)) throw UndecidedProbe("endpoint probe undecided", t1);
    if (!decided(hi.classification)) throw UndecidedProbe("endpoint probe undecided", t2);
    if (lo.classification == hi.classification) {
        throw SameClassificationAtEndpoints(std::string("both endpoints ") +
                                            to_string(lo.classification));
    }
    res.high_t_above = hi.classification == Classification::CollapsedHighT;
    const Classification lo_class = lo.classification;

    res.brackets.push_back({t1, t2});
    while (t2 - t1 >= tol) {
        double mid = 0.5 * (t1 + t2);
        if (mid <= t1 || mid >= t2) break;
        ProbeRecord pm = probe(fam, mid, m_max);
        res.probes.push_back(pm);
        if (!decided(pm.classification)) throw UndecidedProbe("probe undecided", mid);
        if (pm.classification == lo_class) {
            t1 = mid;
        } else {
            t2 = mid;
        }
        res.brackets.push_back({t1, t2});
    }
    res.t_c = 0.5 * (t1 + t2);
    res.tc_probe = probe(fam, res.t_c, m_max);
    res.terminal_l1 = res.tc_probe.min_l1;
    return res;
}

DensityFamily widen_to_bracket(DensityFamily fam, int m_max, double max_half_width) {
    const double mid = 0.5 * (fam.t_lo + fam.t_hi);
    double half = 0.5 * (fam.t_hi - fam.t_lo);
    if (!(half > 0.0)) throw DomainError("family range must have t_lo < t_hi");
    for (;;) {
        std::vector<ProbeRecord> ends(2);
        parallel_for(2, [&](int k) { ends[k] = probe(fam, k == 0 ? fam.t_lo : fam.t_hi, m_max); });
        if (!decided(ends[0].classification)) throw UndecidedProbe("endpoint probe undecided", fam.t_lo);
        if (!decided(ends[1].classification)) throw UndecidedProbe("endpoint probe undecided", fam.t_hi);
        if (ends[0].classification != ends[1].classification) return fam;
        half *= 2.0;
        if (half > max_half_width) {
            throw SameClassificationAtEndpoints(std::string("both endpoints ") +
                                                to_string(ends[0].classification) +
                                                " up to the widest range");
        }
        fam.t_lo = mid - half;
        fam.t_hi = mid + half;
    }
}

DriftFit drift_onset_fit(const CriticalSearchResult& res) {
    // Each bracket endpoint was probed earlier; look up its stay duration.
    auto stay_of = [&](double t) {
        for (const auto& p : res.probes) {
            if (p.t == t) return p.stay_steps;
        }
        return -1;
    };
    std::vector<std::pair<double, double>> pts;
    for (const auto& [a, b] : res.brackets) {
        int sa = stay_of(a), sb = stay_of(b);
        if (sa < 0 || sb < 0) continue;
        pts.push_back({-std::log2(b - a), static_cast<double>(std::min(sa, sb))});
    }
    DriftFit out;
    out.points = static_cast<int>(pts.size());
    if (pts.size() < 3) return out;
    double n = static_cast<double>(pts.size());
    double mx = 0, my = 0;
    for (auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    out.slope = sxy / sxx;
    double rss = 0;
    for (auto& [x, y] : pts) {
        double e = y - my - out.slope * (x - mx);
        rss += e * e;
    }
    out.stderr_ = std::sqrt(rss / std::max(1.0, n - 2) / sxx);
    return out;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Moments1D {
    double mean = 0.0;
    double var = 0.0;
    double skew = 0.0;
    double excess = 0.0;
};

Moments1D log_moments(const GridSpec& g, const std::vector<double>& lv) {
    double mx = *std::max_element(lv.begin(), lv.end());
    auto w = trapezoid_weights(g);
    double m0 = 0, m1 = 0;
    for (int i = 0; i <= g.n; ++i) {
        double wi = w[i] * std::exp(lv[i] - mx);
        m0 += wi;
        m1 += wi * g.node(i);
    }
    Moments1D m;
    m.mean = m1 / m0;
    double m2 = 0, m3 = 0, m4 = 0;
    for (int i = 0; i <= g.n; ++i) {
        double wi = w[i] * std::exp(lv[i] - mx) / m0;
        double d = g.node(i) - m.mean;
        m2 += wi * d * d;
        m3 += wi * d * d * d;
        m4 += wi * d * d * d * d;
    }
    m.var = m2;
    m.skew = m3 / std::pow(m2, 1.5);
    m.excess = m4 / (m2 * m2) - 3.0;
    return m;
}

// One ordered peak of a low-temperature state: S = mu + ell x with x ~ q.
// Pairs from opposite peaks are dropped; their weight is below e^(-2 J mu^2).
struct PeakState {
    std::vector<double> lq;  // normalized log density of x on the grid
    double mu = 0.0;
    double ell = 1.0;
    double J = 1.0;  // pair coupling e^(J S1 S2)
    int level = 0;
    LogTail tail;  // log q past the grid edge
};

// log q' at every node for shift c and ratio r, x' = (x1 + x2 - c) / r.
// Far from the grid the field and tail terms are huge and nearly cancel, so
// the sum is expanded about u = c / 2 and the cancelling parts are dropped.
std::vector<double> peak_block(const PeakState& st, const GridSpec& g, double c, double r) {
    const double L = g.half_width * (1.0 + 1e-14);
    const double h = g.spacing();
    const double inv_h = 1.0 / h;
    const int K = g.half_size();
    const double beta = st.J * st.ell * st.ell;
    const double field = st.J * st.mu * st.ell;
    const double* lv = st.lq.data();
    const double log_h = std::log(h), log_2h = std::log(2.0 * h);
    const bool tail = st.tail.active;
    const double s0 = 0.5 * c;
    double d[5] = {0, 0, 0, 0, 0};
    if (tail) st.tail.taylor(s0, d);
    const double lin = beta * s0 + field + d[1];
    // log q(s0 + y) - d0 - d1 y
    auto at = [&](double y) {
        double x = s0 + y;
        if (std::fabs(x) <= L) return interp_log(lv, g.half_width, inv_h, g.n, x) - d[0] - d[1] * y;
        if (!tail) return kNegInf;
        return y * y * (d[2] + y * (d[3] + y * d[4]));
    };
    std::vector<double> out(g.n + 1, kNegInf);
    parallel_for(g.n + 1, [&](int i) {
        double dl = 0.5 * r * g.node(i);
        if (std::fabs(s0 + dl) > L && !tail) return;
        double mx = kNegInf;
        std::vector<double> terms;
        terms.reserve(K);
        for (int j = 0; j < K; ++j) {
            double t = j * h;
            bool off = s0 + dl + t > L || s0 + dl - t < -L;
            if (off && !tail) break;
            double term = at(dl + t) + at(dl - t) - beta * t * t +
                          ((j == 0 || j == K - 1) ? log_h : log_2h);
            terms.push_back(term);
            mx = std::max(mx, term);
        }
        if (mx == kNegInf) return;
        double sum = 0.0;
        for (double x : terms) sum += std::exp(x - mx);
        out[i] = 2.0 * lin * dl + beta * dl * dl + mx + std::log(sum);
    });
    double lz = log_trapezoid(g, out);
    if (!std::isfinite(lz)) throw ResolutionLoss("peak block step lost all mass");
    for (double& x : out) x -= lz;
    return out;
}

// Largest |x| with log q(x) >= max log q - drop.
double two_sided_extent(const GridSpec& g, const std::vector<double>& lv, double drop) {
    double mx = *std::max_element(lv.begin(), lv.end());
    double e = 0.0;
    for (int i = 0; i <= g.n; ++i) {
        if (lv[i] >= mx - drop) e = std::max(e, std::fabs(g.node(i)));
    }
    return e;
}

// Gaussian variance of x whose drop-level extent is the frame target.
double peak_frame_var(const GridSpec& g, const FrameOptions& fo) {
    double e = fo.target * g.half_width;
    return e * e / (2.0 * fo.drop);
}

// Pair-sum centre and spread from the quartic tail: the rightmost maximum of
// F(u) = beta u^2 + 2 h u + 2 P(u) with u = (x1 + x2) / 2. The positive peak
// never crosses to the other well.
bool predict_with_tail(const PeakState& st, const GridSpec& g, const FrameOptions& fo,
                       double& c, double& r) {
    if (!st.tail.active) return false;
    const double beta = st.J * st.ell * st.ell;
    const double field = st.J * st.mu * st.ell;
    const double* k = st.tail.c;
    // F'(u) / 2 = 4 k4 u^3 + 3 k3 u^2 + (2 k2 + beta) u + (k1 + h).
    if (k[4] == 0.0) {
        double a2 = 2.0 * k[2] + beta;
        if (!(a2 < 0.0)) return false;
        c = -2.0 * (k[1] + field) / a2;
        r = std::sqrt(2.0 / -a2 / peak_frame_var(g, fo));
        return true;
    }
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    double lead = 4.0 * k[4];
    comp(0, 0) = -3.0 * k[3] / lead;
    comp(0, 1) = -(2.0 * k[2] + beta) / lead;
    comp(0, 2) = -(k[1] + field) / lead;
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
    double best_u = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        auto z = es.eigenvalues()(i);
        if (std::fabs(z.imag()) > 1e-9 * (1.0 + std::fabs(z.real()))) continue;
        best_u = std::max(best_u, z.real());
    }
    double curv = 2.0 * beta + 2.0 * (2.0 * k[2] + 6.0 * k[3] * best_u + 12.0 * k[4] * best_u * best_u);
    if (!std::isfinite(best_u) || !(curv < 0.0)) return false;
    c = 2.0 * best_u;
    r = std::sqrt(4.0 / -curv / peak_frame_var(g, fo));
    return true;
}

// One block step of the peak; c and r seed the output frame when positive r is given.
PeakState peak_step(const PeakState& st, const GridSpec& g, const FrameOptions& fo,
                    double c = 0.0, double r = 0.0) {
    const double L = g.half_width;
    if (!(r > 0.0) && !predict_with_tail(st, g, fo, c, r)) {
        // Gaussian prediction of the pair sum centre; keep the previous extent.
        const double beta = st.J * st.ell * st.ell;
        const double field = st.J * st.mu * st.ell;
        Moments1D m = log_moments(g, st.lq);
        double f = 1.0 - beta * m.var;
        if (!(f > 0.0)) throw ResolutionLoss("peak coupling beta v reached 1");
        c = 2.0 * m.mean / f + 2.0 * field * m.var / f;
        r = std::sqrt(2.0 / f);
    }
    for (int attempt = 0; attempt < fo.max_attempts; ++attempt) {
        std::vector<double> lv = peak_block(st, g, c, r);
        Moments1D o = log_moments(g, lv);
        double e = two_sided_extent(g, lv, fo.drop);
        double edge = std::max(lv.front(), lv.back());
        if (std::fabs(o.mean) < 0.01 * L && e >= fo.low * L && e <= fo.high * L &&
            edge < std::log(1e-12)) {
            PeakState next;
            next.lq = std::move(lv);
            next.mu = 2.0 * st.mu + st.ell * c;
            next.ell = r * st.ell;
            next.J = st.J;  // caller applies the level factor
            next.level = st.level + 1;
            next.tail = fit_log_tail(g, next.lq);
            return next;
        }
        c += r * o.mean;
        r *= std::max(e, 2.0 * g.spacing()) / (fo.target * L);
    }
    throw ResolutionLoss("no frame keeps the peak on the grid");
}

// Redoes the step that split the density, from the unimodal state before it,
// straight into a frame on the positive peak. No pair is dropped here.
PeakState peak_onset(const FramedDensity& before, const FramedDensity& after,
                     const GridSpec& g, const FrameOptions& fo) {
    std::vector<double> half(g.n + 1, kNegInf);
    const auto& src = after.density.log_values();
    for (int i = g.center(); i <= g.n; ++i) half[i] = src[i];
    Moments1D m = log_moments(g, half);

    PeakState base;
    base.lq = before.density.log_values();
    base.ell = std::exp2(before.log2_scale);
    base.J = std::exp2(before.log2_beta) / (base.ell * base.ell);
    base.level = before.level;
    base.tail = fit_log_tail(before.density);
    double k = std::exp2(after.log2_scale - before.log2_scale);
    double c = k * m.mean;
    double r = k * std::sqrt(m.var / peak_frame_var(g, fo));
    // With a quartic tail the split is a saddle of beta u^2 + 2 log q(u):
    // u^2 = -(beta + 2 c2) / (4 c4), pair-sum variance 1 / (beta + 2 c2).
    double beta = std::exp2(before.log2_beta);
    double curv = beta + 2.0 * base.tail.c[2];
    if (base.tail.active && base.tail.c[4] < 0.0 && curv > 0.0) {
        c = 2.0 * std::sqrt(-curv / (4.0 * base.tail.c[4]));
        r = std::sqrt(1.0 / curv / peak_frame_var(g, fo));
    }
    return peak_step(base, g, fo, c, r);
}

double log_peak(const GridSpec& g, const std::vector<double>& lv) {
    int best = 0;
    for (int i = 1; i <= g.n; ++i) {
        if (lv[i] > lv[best]) best = i;
    }
    if (best == 0 || best == g.n) return g.node(best);
    double den = lv[best - 1] - 2.0 * lv[best] + lv[best + 1];
    double off = den < 0.0 ? 0.5 * (lv[best - 1] - lv[best + 1]) / den : 0.0;
    return g.node(best) + off * g.spacing();
}

}  // namespace

ObservableResult observe(const GridDensity& p0, const ModelParams& params,
                         const ObservableOptions& opt) {
    const double sigma = params.sigma;
    const double rho_max = opt.rho_fraction * sigma;
    const double q = std::pow(2.0, 1.0 - params.a);
    const GridSpec& g = p0.grid();
    ObservableResult out;

    FramedDensity st = framed_start(p0);
    FramedDensity prev;
    double rho = 0.0, tau = 0.0, mean = 0.0, peak = 0.0;
    bool bimodal = false;
    for (;;) {
        const GridDensity& d = st.density;
        double beta = std::exp2(st.log2_beta);
        double log2_tau = 2.0 * st.log2_scale - st.level;  // l^2 / 2^n
        double pk = peak_location(d);
        if (pk == 0.0) {
            double m2 = moments(d, 2);
            double ex = moments(d, 4) / (m2 * m2) - 3.0;
            if (std::fabs(ex) < opt.high_kurtosis && beta * m2 < rho_max) {
                out.regime = Regime::HighT;
                rho = beta * m2;
                tau = m2 * std::exp2(log2_tau);
                break;
            }
        } else {
            const auto& lv = d.log_values();
            double depth = *std::max_element(lv.begin(), lv.end()) - lv[g.center()];
            if (depth > opt.valley_depth) {
                bimodal = true;
                break;
            }
        }
        if (st.level >= opt.max_levels) break;
        try {
            FramedDensity next = framed_step(st, params, opt.frame);
            prev = std::move(st);
            st = std::move(next);
        } catch (const Error&) {
            break;
        }
    }
    int level = st.level;

    if (bimodal) {
        // Follow one peak in its own frame until it is Gaussian.
        const double jfac = std::exp2(-params.a);
        PeakState ps;
        ps.level = st.level;
        try {
            if (st.level == 0) throw ResolutionLoss("initial density is already split");
            ps = peak_onset(prev, st, g, opt.peak_frame);
            ps.J *= jfac;
            for (;;) {
                Moments1D m = log_moments(g, ps.lq);
                double r_h = ps.J * ps.ell * ps.ell * m.var;
                if (std::fabs(m.excess) < opt.low_kurtosis &&
                    std::fabs(m.skew) < opt.low_skewness && r_h < rho_max) {
                    double inv = std::exp2(-ps.level);
                    out.regime = Regime::LowT;
                    rho = r_h;
                    tau = ps.ell * ps.ell * m.var * inv;
                    mean = (ps.mu + ps.ell * m.mean) * inv;
                    peak = (ps.mu + ps.ell * log_peak(g, ps.lq)) * inv;
                    break;
                }
                if (ps.level >= opt.max_levels) break;
                ps = peak_step(ps, g, opt.peak_frame);
                ps.J *= jfac;
            }
        } catch (const Error&) {
            // Left unresolved.
        }
        level = ps.level;
    }
    out.switch_level = out.regime == Regime::Unresolved ? -1 : level;

    if (out.regime == Regime::Unresolved) {
        // Report the raw state; the caller flags it.
        const GridDensity& d = st.density;
        double log2_mean = st.log2_scale - st.level;
        out.level = st.level;
        out.tau = moments(d, 2) * std::exp2(2.0 * st.log2_scale - st.level);
        out.tau_prev2 = out.tau;
        out.m_peak = peak_location(d) * std::exp2(log2_mean);
        out.m_second = std::sqrt(moments(d, 2)) * std::exp2(log2_mean);
        return out;
    }

    // Exact Gaussian recursion from the switch level to the reporting level.
    int target = std::max(opt.n, level);
    double tau_prev2 = tau;
    std::vector<double> history{tau};
    while (level < target) {
        double f = 1.0 / (1.0 - rho);
        tau *= f;
        mean *= f;
        peak *= f;
        rho = q * rho * f;
        ++level;
        history.push_back(tau);
    }
    if (history.size() >= 3) tau_prev2 = history[history.size() - 3];
    out.level = level;
    out.tau = tau;
    out.tau_prev2 = tau_prev2;
    out.m_peak = peak;
    out.m_second = std::sqrt(mean * mean + tau * std::exp2(-level));
    out.stabilized = history.size() >= 3 && std::fabs(tau / tau_prev2 - 1.0) < 0.01;
    return out;
}

namespace {

std::vector<CurvePoint> curve(const DensityFamily& fam, const std::vector<double>& ts,
                              const ObservableOptions& opt, Regime want) {
    std::vector<CurvePoint> pts(ts.size());
    parallel_for(static_cast<int>(ts.size()), [&](int k) {
        CurvePoint& cp = pts[k];
        cp.t = ts[k];
        ObservableResult r;
        try {
            r = observe(family_density(fam, ts[k]), fam.params, opt);
        } catch (const Error& e) {
            cp.flagged = true;
            cp.note = e.what();
            return;
        }
        cp.tau = r.tau;
        cp.m = r.m_peak;
        cp.m_second = r.m_second;
        cp.switch_level = r.switch_level;
        if (r.regime != want) {
            cp.flagged = true;
            cp.note = want == Regime::LowT ? "not bimodal at the reporting level"
                                           : "did not reach the high-temperature regime";
            if (r.regime == Regime::Unresolved) cp.note = "asymptotic regime not reached";
        } else if (!r.stabilized) {
            cp.flagged = true;
            cp.note = "variance not stabilized";
        }
    });
    return pts;
}

}  // namespace

std::vector<CurvePoint> susceptibility_curve(const DensityFamily& fam, double,
                                             const std::vector<double>& t_values,
                                             const ObservableOptions& options) {
    return curve(fam, t_values, options, Regime::HighT);
}

std::vector<CurvePoint> magnetization_curve(const DensityFamily& fam, double,
                                            const std::vector<double>& t_values,
                                            const ObservableOptions& options) {
    return curve(fam, t_values, options, Regime::LowT);
}

std::vector<double> fit_window(const DensityFamily& fam, double t_c, bool high_t_above,
                               Regime side, int count) {
    if (count < 2) throw DomainError("fit window needs at least two points");
    if (side == Regime::Unresolved) throw DomainError("fit window needs a phase side");
    double width = fam.t_hi - fam.t_lo;
    bool above = (side == Regime::HighT) == high_t_above;
    std::vector<double> ts;
    for (int k = 0; k < count; ++k) {
        double e = -10.0 + 6.0 * k / (count - 1);
        double d = std::exp2(e) * width;
        ts.push_back(above ? t_c + d : t_c - d);
    }
    return ts;
}

PowerFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) throw DomainError("fit needs at least four points");
    double n = static_cast<double>(points.size());
    double mx = 0, my = 0;
    std::vector<std::pair<double, double>> lg;
    for (auto [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw DomainError("fit needs positive x and y");
        lg.push_back({std::log2(x), std::log2(y)});
        mx += lg.back().first;
        my += lg.back().second;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (auto [x, y] : lg) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (!(sxx > 1e-24 * n)) throw DomainError("degenerate x range");
    PowerFit f;
    f.points = static_cast<int>(points.size());
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    for (auto [x, y] : lg) {
        double e = y - f.intercept - f.slope * x;
        rss += e * e;
    }
    f.stderr_ = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
    return f;
}

}  // namespace dyson
