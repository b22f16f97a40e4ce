#include <doctest.h>

#include <cmath>
#include <random>

#include "dyson/error.hpp"
#include "dyson/model.hpp"

using namespace dyson;

TEST_CASE("hierarchical distance") {
    CHECK(hierarchical_distance(5, 5, 3) == 0.0);
    CHECK(hierarchical_distance(1, 2, 3) == 1.0);
    CHECK(hierarchical_distance(1, 5, 3) == 4.0);
    CHECK(hierarchical_distance(3, 4, 3) == 1.0);
    CHECK(hierarchical_distance(2, 3, 3) == 2.0);
    CHECK_THROWS_AS(hierarchical_distance(0, 1, 3), DomainError);
    CHECK_THROWS_AS(hierarchical_distance(1, 9, 3), DomainError);
}

TEST_CASE("distance is an ultrametric") {
    const int n = 5;
    const int size = 1 << n;
    bool ok = true;
    for (int x = 1; x <= size; ++x) {
        for (int y = 1; y <= size; ++y) {
            double dxy = hierarchical_distance(x, y, n);
            for (int z = 1; z <= size; ++z) {
                double dxz = hierarchical_distance(x, z, n);
                double dyz = hierarchical_distance(y, z, n);
                ok = ok && dxz <= std::max(dxy, dyz);
            }
        }
    }
    CHECK(ok);
}

TEST_CASE("hamiltonian small cases") {
    CHECK(hamiltonian({0.7, -1.3}, 1.5) == doctest::Approx(0.7 * 1.3));
    CHECK(hamiltonian({1, 1, 1, 1}, 1.0) == doctest::Approx(-4.0));
    CHECK(hamiltonian(std::vector<double>(8, 0.0), 1.25) == 0.0);
    CHECK_THROWS_AS(hamiltonian({1, 1, 1}, 1.5), DomainError);
}

TEST_CASE("hamiltonian splits into the first level and the block Hamiltonian") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (double a : {1.25, 1.5, 1.75}) {
        for (int n = 1; n <= 5; ++n) {
            std::vector<double> s(1u << n);
            for (double& x : s) x = nd(rng);
            double first = 0.0;
            std::vector<double> blocks(s.size() / 2);
            for (size_t u = 0; u < blocks.size(); ++u) {
                first -= s[2 * u] * s[2 * u + 1];
                blocks[u] = (s[2 * u] + s[2 * u + 1]) / std::pow(2.0, a / 2.0);
            }
            double rest = n == 1 ? 0.0 : hamiltonian(blocks, a);
            CHECK(hamiltonian(s, a) == doctest::Approx(first + rest).epsilon(1e-12));
        }
    }
}

TEST_CASE("enumeration at one level") {
    const double beta = 0.8, a = 1.4;
    AtomicMeasure m = enumerate_total_spin(1, AtomicMeasure::ising(), beta, a);
    REQUIRE(m.size() == 3);
    double loc = std::pow(2.0, 1.0 - a / 2.0);
    double z = 2.0 * std::exp(beta) + 2.0 * std::exp(-beta);
    CHECK(m.atoms()[0].location == doctest::Approx(-loc));
    CHECK(m.atoms()[1].location == doctest::Approx(0.0));
    CHECK(m.atoms()[2].location == doctest::Approx(loc));
    CHECK(m.atoms()[0].weight == doctest::Approx(std::exp(beta) / z));
    CHECK(m.atoms()[1].weight == doctest::Approx(2.0 * std::exp(-beta) / z));
    CHECK(m.atoms()[2].weight == doctest::Approx(std::exp(beta) / z));

    AtomicMeasure free = enumerate_total_spin(1, AtomicMeasure::ising(), 0.0, a);
    CHECK(free.atoms()[0].weight == doctest::Approx(0.25));
    CHECK(free.atoms()[1].weight == doctest::Approx(0.5));
}

TEST_CASE("enumeration output is symmetric") {
    AtomicMeasure m = enumerate_total_spin(3, AtomicMeasure::ising(), 0.6, 1.5);
    const auto& at = m.atoms();
    for (size_t i = 0; i < at.size(); ++i) {
        CHECK(at[i].location == doctest::Approx(-at[at.size() - 1 - i].location));
        CHECK(at[i].weight == doctest::Approx(at[at.size() - 1 - i].weight).epsilon(1e-13));
    }
}

TEST_CASE("enumeration budget") {
    CHECK_THROWS_AS(enumerate_total_spin(5, AtomicMeasure::ising(), 0.3, 1.5), BudgetExceeded);
}

TEST_CASE("atomic step") {
    AtomicMeasure d = rg_step_atomic(AtomicMeasure::point_mass(), 0.7, 1.5);
    REQUIRE(d.size() == 1);
    CHECK(d.atoms()[0].location == 0.0);
    CHECK(d.atoms()[0].weight == doctest::Approx(1.0));

    AtomicMeasure c = rg_step_atomic(AtomicMeasure::ising(), 0.0, 1.25);
    REQUIRE(c.size() == 3);
    CHECK(c.atoms()[2].location == doctest::Approx(std::pow(2.0, 1.0 - 0.625)));
    CHECK(c.atoms()[0].weight == doctest::Approx(0.25));
    CHECK(c.atoms()[1].weight == doctest::Approx(0.5));
}

TEST_CASE("iterated atomic step equals enumeration") {
    for (double a : {1.25, 1.5, 1.75}) {
        for (double beta : {0.0, 0.3, 1.0}) {
            AtomicMeasure r = AtomicMeasure::ising();
            for (int n = 1; n <= 4; ++n) {
                r = rg_step_atomic(r, beta, a);
                AtomicMeasure e = enumerate_total_spin(n, AtomicMeasure::ising(), beta, a);
                CAPTURE(a);
                CAPTURE(beta);
                CAPTURE(n);
                CHECK(total_variation(r, e) < 1e-10);
                CHECK(max_atom_error(r, e) < 1e-10);
            }
        }
    }
}

TEST_CASE("measures must be symmetric") {
    CHECK_THROWS_AS(AtomicMeasure::from_atoms({{-1.0, 0.3}, {1.0, 0.7}}), DomainError);
    CHECK_THROWS_AS(AtomicMeasure::from_atoms({{-1.0, 0.5}, {2.0, 0.5}}), DomainError);
}
