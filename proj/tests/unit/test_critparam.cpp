#include <doctest.h>

#include <cmath>
#include <random>

#include "dyson/critparam.hpp"
#include "dyson/error.hpp"
#include "dyson/fixedpoint.hpp"

using namespace dyson;

namespace {

const GridSpec kGrid{10.0, 2048};

// Gaussian line through the fixed point with separatrix at t = t_star.
DensityFamily gaussian_line(const ModelParams& p, double t_star, double half_width) {
    DensityFamily fam = default_family(p, kGrid);
    fam.t_lo = -half_width;
    fam.t_hi = half_width;
    fam.custom = [p, t_star](double t) {
        return gaussian_density(p.sigma * std::exp(t - t_star), kGrid);
    };
    return fam;
}

// Iterated Gaussian variance map, returned as the CLT variance at level n.
double oracle_tau(double v, int n, const ModelParams& p) {
    double log2_tau = std::log2(v);
    for (int k = 0; k < n; ++k) {
        double next = gaussian_variance_map(v, p);
        log2_tau += std::log2(next / v) + (p.a - 1.0);
        v = next;
    }
    return std::exp2(log2_tau);
}

}  // namespace

TEST_CASE("default families") {
    ModelParams p(1.25);
    DensityFamily fam = default_family(p, kGrid);
    CHECK(fam.kind == BaseKind::Gaussian);
    CHECK(fam.b4 == -0.01);
    CHECK(fam.t_lo == -0.2);
    CHECK(fam.t_hi == 0.2);
    CHECK(fam.b2(fam.t_lo) < 0.0);
    CHECK(fam.b2(fam.t_hi) > 0.0);

    DensityFamily flat = fam;
    flat.b4 = 0.0;
    CHECK(l1_distance(family_density(flat, 0.0), gaussian_fixed_point(p, kGrid)) < 1e-12);
    CHECK(variance(family_density(flat, 0.05)) > p.sigma);
    CHECK(variance(family_density(flat, -0.05)) < p.sigma);

    GridDensity q = family_density(fam, 0.1);
    const auto& lv = q.log_values();
    for (int i = 0; i <= kGrid.n; ++i) REQUIRE(lv[i] == lv[kGrid.n - i]);
    CHECK(moments(q, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("search recovers the separatrix of the gaussian line") {
    ModelParams p(1.25);
    const double t_star = 0.0123456789;
    DensityFamily fam = gaussian_line(p, t_star, 0.1);
    const double tol = 1e-8;
    CriticalSearchResult r = critical_search(fam, 400, tol);
    CHECK(std::fabs(r.t_c - t_star) < tol);
    CHECK_FALSE(r.high_t_above);

    REQUIRE(r.brackets.size() >= 2);
    for (size_t i = 1; i < r.brackets.size(); ++i) {
        const auto& outer = r.brackets[i - 1];
        const auto& inner = r.brackets[i];
        CHECK(outer.first <= inner.first);
        CHECK(inner.second <= outer.second);
        CHECK(inner.second - inner.first < outer.second - outer.first);
    }
    for (const auto& b : r.brackets) CHECK((b.first <= r.t_c && r.t_c <= b.second));
    CHECK(r.brackets.back().second - r.brackets.back().first < tol);
}

TEST_CASE("search argument checks") {
    ModelParams p(1.25);
    DensityFamily fam = gaussian_line(p, 0.5, 0.1);
    CHECK_THROWS_AS(critical_search(fam, 200, 1e-6), SameClassificationAtEndpoints);
    CHECK_THROWS_AS(critical_search(fam, 200, 1e-17), DomainError);
    CHECK_THROWS_AS(critical_search(fam, 0, 1e-6), DomainError);
}

TEST_CASE("range widening") {
    ModelParams p(1.25);
    DensityFamily fam = widen_to_bracket(gaussian_line(p, 0.3, 0.1), 200);
    CHECK(fam.t_lo < 0.3);
    CHECK(fam.t_hi > 0.3);
    CHECK(fam.t_hi - fam.t_lo == doctest::Approx(0.8));
    CHECK_THROWS_AS(widen_to_bracket(gaussian_line(p, 5.0, 0.1), 200), SameClassificationAtEndpoints);
}

TEST_CASE("default family brackets at a = 1.25") {
    ModelParams p(1.25);
    DensityFamily fam = default_family(p, kGrid);
    CriticalSearchResult r = critical_search(fam, 600, 1e-6 * (fam.t_hi - fam.t_lo));
    CHECK(r.t_c == doctest::Approx(-0.1036261).epsilon(1e-4));
    CHECK_FALSE(r.high_t_above);
    for (size_t i = 1; i < r.brackets.size(); ++i) {
        CHECK(r.brackets[i - 1].first <= r.brackets[i].first);
        CHECK(r.brackets[i].second <= r.brackets[i - 1].second);
    }
}

TEST_CASE("power law fits") {
    std::vector<std::pair<double, double>> sq, inv, noisy;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 12; ++k) {
        double x = std::exp2(-10.0 + 0.5 * k);
        sq.push_back({x, x * x});
        inv.push_back({x, 3.0 / x});
        noisy.push_back({x, std::sqrt(x) * (1.0 + 0.01 * nd(rng))});
    }
    PowerFit a = fit_exponent(sq);
    CHECK(a.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a.stderr_ < 1e-10);
    CHECK(fit_exponent(inv).slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::fabs(fit_exponent(noisy).slope - 0.5) < 0.02);

    CHECK_THROWS_AS(fit_exponent({{1, 1}, {2, 2}, {3, 3}}), DomainError);
    CHECK_THROWS_AS(fit_exponent({{1, 1}, {1, 2}, {1, 3}, {1, 4}}), DomainError);
    CHECK_THROWS_AS(fit_exponent({{1, 1}, {2, -2}, {3, 3}, {4, 4}}), DomainError);
}

TEST_CASE("fit window") {
    ModelParams p(1.25);
    DensityFamily fam = default_family(p, kGrid);
    std::vector<double> hi = fit_window(fam, -0.1, false, Regime::HighT, 8);
    std::vector<double> lo = fit_window(fam, -0.1, false, Regime::LowT, 8);
    REQUIRE(hi.size() == 8);
    REQUIRE(lo.size() == 8);
    double w = fam.t_hi - fam.t_lo;
    CHECK(-0.1 - hi.front() == doctest::Approx(w / 1024.0));
    CHECK(-0.1 - hi.back() == doctest::Approx(w / 16.0));
    for (double t : lo) CHECK(t > -0.1);
    for (size_t i = 2; i < hi.size(); ++i) {
        double r1 = (hi[i] + 0.1) / (hi[i - 1] + 0.1), r0 = (hi[i - 1] + 0.1) / (hi[i - 2] + 0.1);
        CHECK(r1 == doctest::Approx(r0));
    }
    CHECK_THROWS_AS(fit_window(fam, -0.1, false, Regime::Unresolved, 8), DomainError);
}

TEST_CASE("observables on gaussian starts follow the variance map") {
    for (double a : {1.25, 1.55}) {
        ModelParams p(a);
        for (double v0 : {0.01, 0.1, 0.5 * p.sigma, 0.9 * p.sigma}) {
            ObservableResult r = observe(gaussian_density(v0, kGrid), p);
            CAPTURE(a);
            CAPTURE(v0);
            CHECK(r.regime == Regime::HighT);
            CHECK(r.stabilized);
            CHECK(r.tau == doctest::Approx(oracle_tau(v0, 256, p)).epsilon(1e-6));
            CHECK(r.m_peak == 0.0);
        }
    }
    // Nearly independent spins.
    ModelParams p(1.25);
    ObservableResult weak = observe(gaussian_density(0.01, kGrid), p);
    CHECK(weak.tau / 0.01 > 1.0);
    CHECK(weak.tau / 0.01 < 1.1);
}

TEST_CASE("curves flag points on the wrong side") {
    ModelParams p(1.25);
    DensityFamily fam = default_family(p, kGrid);
    const double t_c = -0.1036261;
    std::vector<CurvePoint> m = magnetization_curve(fam, t_c, {-0.15});
    REQUIRE(m.size() == 1);
    CHECK(m[0].flagged);
    std::vector<CurvePoint> s = susceptibility_curve(fam, t_c, {0.0});
    REQUIRE(s.size() == 1);
    CHECK(s[0].flagged);
}

TEST_CASE("low temperature magnetization estimators agree") {
    ModelParams p(1.25);
    DensityFamily fam = default_family(p, kGrid);
    const double t_c = -0.1036261;
    std::vector<CurvePoint> m = magnetization_curve(fam, t_c, {-0.09, -0.05});
    REQUIRE(m.size() == 2);
    for (const CurvePoint& c : m) {
        CHECK_FALSE(c.flagged);
        CHECK(c.m > 0.0);
        CHECK(std::fabs(c.m_second / c.m - 1.0) < 0.02);
        CHECK(c.tau > 0.0);
    }
    CHECK(m[1].m > m[0].m);

    std::vector<CurvePoint> s = susceptibility_curve(fam, t_c, {-0.15, -0.12});
    REQUIRE(s.size() == 2);
    CHECK_FALSE(s[0].flagged);
    CHECK_FALSE(s[1].flagged);
    CHECK(s[1].tau > s[0].tau);
}
