#include <doctest.h>

#include <cmath>
#include <random>

#include "dyson/critparam.hpp"
#include "dyson/density.hpp"
#include "dyson/error.hpp"
#include "dyson/fixedpoint.hpp"
#include "dyson/model.hpp"
#include "dyson/rgflow.hpp"

using namespace dyson;

namespace {

const GridSpec kGrid{10.0, 2048};

GridDensity from_formula(const GridSpec& g, double (*f)(double, double), double k) {
    std::vector<double> lv(g.n + 1);
    for (int i = 0; i <= g.n; ++i) lv[i] = f(g.node(i), k);
    return GridDensity::from_log(g, lv);
}

double quartic_log(double s, double scale) {
    double x = s / scale;
    return -x * x / 0.4 - 0.3 * x * x * x * x;
}

// Sum of normals of width w at the atoms.
GridDensity mollify(const AtomicMeasure& m, double w, const GridSpec& g) {
    std::vector<double> v(g.n + 1, 0.0);
    for (int i = 0; i <= g.n; ++i) {
        double s = g.node(i);
        for (const Atom& at : m.atoms()) {
            double z = (s - at.location) / w;
            v[i] += at.weight * std::exp(-0.5 * z * z);
        }
    }
    return GridDensity::from_values(g, v);
}

}  // namespace

TEST_CASE("gaussian fixed point is invariant") {
    for (double a : {1.1, 1.25, 1.5, 1.75}) {
        ModelParams p(a);
        GridDensity fp = gaussian_fixed_point(p, kGrid);
        CHECK(l1_distance(rg_step(fp, p), fp) < 1e-7);
    }
}

TEST_CASE("gaussian variance map") {
    ModelParams p15(1.5);
    CHECK(gaussian_variance_map(0.2, p15) == doctest::Approx(0.1767766953).epsilon(1e-9));
    ModelParams p125(1.25);
    CHECK(gaussian_variance_map(0.3, p125) == doctest::Approx(std::pow(2.0, -0.25) * 0.3 / 0.7));
    CHECK(gaussian_variance_map(p125.sigma, p125) == doctest::Approx(p125.sigma).epsilon(1e-14));
    CHECK(gaussian_variance_map(1e-9, p125) / 1e-9 == doctest::Approx(std::pow(2.0, -0.25)));
    CHECK_THROWS_AS(gaussian_variance_map(1.0, p125), DomainError);
    CHECK_THROWS_AS(gaussian_variance_map(0.0, p125), DomainError);
}

TEST_CASE("gaussian step examples") {
    ModelParams p(1.5);
    GridDensity out = rg_step(gaussian_density(0.2, kGrid), p);
    CHECK(l1_distance(out, gaussian_density(0.17677669529663687, kGrid)) < 1e-7);
    CHECK_THROWS_AS(rg_step(gaussian_density(1.1, kGrid), p), NormalizerDivergence);
}

TEST_CASE("gaussian family is closed under the map") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ua(1.05, 1.95), uv(0.02, 0.6);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        ModelParams p(ua(rng));
        double v = uv(rng);
        GridDensity out = rg_step(gaussian_density(v, kGrid), p);
        worst = std::max(worst, l1_distance(out, gaussian_density(gaussian_variance_map(v, p), kGrid)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("variance is unstable at the fixed point") {
    for (double a : {1.25, 1.5, 1.75}) {
        ModelParams p(a);
        for (double d : {-0.05, -1e-2, -1e-3, 1e-3, 1e-2, 0.05}) {
            double v = p.sigma + d;
            CHECK(std::fabs(gaussian_variance_map(v, p) - p.sigma) > std::fabs(d));
        }
    }
}

TEST_CASE("general beta") {
    ModelParams p(1.5);
    GridDensity q = from_formula(kGrid, quartic_log, 1.0);
    CHECK(l1_distance(rg_step_general_beta(q, 1.0, p), rg_step(q, p)) == 0.0);

    GridDensity g = gaussian_density(0.3, kGrid);
    CHECK(l1_distance(rg_step_general_beta(g, 0.0, p),
                      gaussian_density(std::pow(2.0, -0.5) * 0.3, kGrid)) < 1e-8);

    // The coupling can be absorbed into the spin scale.
    const double beta = 0.5, rb = std::sqrt(beta);
    GridDensity direct = rg_step_general_beta(q, beta, p);
    GridDensity scaled = rg_step(from_formula(kGrid, quartic_log, rb), p);
    std::vector<double> back(kGrid.n + 1);
    for (int i = 0; i <= kGrid.n; ++i) back[i] = scaled.at(rb * kGrid.node(i));
    CHECK(l1_distance(direct, GridDensity::from_values(kGrid, back)) < 1e-6);
}

TEST_CASE("mollified atoms follow the atomic map") {
    const GridSpec g{3.0, 4096};
    const double beta = 0.3;
    for (double a : {1.25, 1.5, 1.75}) {
        ModelParams p(a);
        AtomicMeasure out = rg_step_atomic(AtomicMeasure::ising(), beta, a);
        for (double w : {0.05, 0.02, 0.01}) {
            GridDensity smooth = rg_step_general_beta(mollify(AtomicMeasure::ising(), w, g), beta, p);
            GridDensity target = mollify(out, w * std::pow(2.0, (1.0 - a) / 2.0), g);
            CAPTURE(a);
            CAPTURE(w);
            CHECK(l1_distance(smooth, target) < 5.0 * w);
        }
    }
}

TEST_CASE("flow classification") {
    ModelParams p(1.25);
    GridDensity fp = gaussian_fixed_point(p, kGrid);
    FlowTrace at = flow(fp, p, 10);
    CHECK(at.classification == Classification::ConvergedToFixedPoint);
    CHECK(at.steps == 0);

    FlowTrace low = flow(gaussian_density(p.sigma / 2.0, kGrid), p, 60);
    CHECK(low.classification == Classification::CollapsedHighT);
    FlowTrace high = flow(gaussian_density((1.0 + p.sigma) / 2.0, kGrid), p, 60);
    CHECK(high.classification == Classification::EscapedLowT);

    for (const FlowStep& s : low.iterates) CHECK(s.variance > 0.0);
    REQUIRE(low.iterates.size() >= 2);
    CHECK(low.iterates.back().variance < low.iterates.front().variance);
    CHECK_THROWS_AS(flow(fp, p, 0), DomainError);
}

TEST_CASE("evenness and normalization survive many steps") {
    ModelParams p(1.25);
    GridDensity q = from_formula(kGrid, quartic_log, 1.0);
    for (int k = 0; k < 8; ++k) {
        q = rg_step(q, p);
        CHECK(moments(q, 0) == doctest::Approx(1.0).epsilon(1e-12));
        const auto& lv = q.log_values();
        for (int i = 0; i <= kGrid.n; ++i) REQUIRE(lv[i] == lv[kGrid.n - i]);
    }
}

TEST_CASE("rescaling to the central limit normalization") {
    ModelParams p(1.25);
    GridDensity g = gaussian_density(0.1, kGrid);
    CHECK(l1_distance(rescale_to_clt(g, 0, p), g) == 0.0);
    GridDensity r = rescale_to_clt(g, 4, p);
    CHECK(variance(r) == doctest::Approx(0.1 * std::pow(2.0, 4 * 0.25)).epsilon(1e-8));
    CHECK_THROWS_AS(rescale_to_clt(gaussian_density(1.0, kGrid), 20, p), ResolutionLoss);
}

TEST_CASE("high temperature iterates become gaussian") {
    ModelParams p(1.25);
    // Deep in the high temperature phase of the standard family (t_c is near -0.104).
    GridDensity q = family_density(default_family(p, kGrid), -0.16);
    FlowOptions keep;
    keep.stop_at_fixed_point = false;
    REQUIRE(flow(q, p, 60, keep).classification == Classification::CollapsedHighT);
    for (int k = 0; k < 16; ++k) q = rg_step(q, p);
    GridDensity r = rescale_to_clt(q, 16, p);
    double v = variance(r);
    std::vector<double> diff = r.values();
    for (int i = 0; i <= kGrid.n; ++i) {
        double s = kGrid.node(i);
        diff[i] = std::fabs(diff[i] - std::exp(-s * s / (2 * v)) / std::sqrt(2 * M_PI * v));
    }
    CHECK(trapezoid(kGrid, diff) < 0.05);
}
