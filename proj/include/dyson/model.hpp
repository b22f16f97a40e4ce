#pragma once

#include <cstdint>
#include <vector>

namespace dyson {

// Sites 1..2^n of the hierarchical volume V_n.
struct HierarchicalVolume {
    int n = 0;
    std::int64_t size() const { return std::int64_t{1} << n; }
};

// 2^(j-1) with j the smallest block level holding both sites; 0 when x == y.
double hierarchical_distance(std::int64_t x, std::int64_t y, int n);

// -sum_{x<y} s_x s_y / d(x,y)^a for a configuration of length 2^n. Accepts any a > 0.
double hamiltonian(const std::vector<double>& config, double a);

struct Atom {
    double location = 0.0;
    double weight = 0.0;
};

// Finitely supported even probability measure.
class AtomicMeasure {
public:
    AtomicMeasure() = default;

    // Sorts, merges locations closer than 1e-12, normalizes and checks symmetry.
    static AtomicMeasure from_atoms(std::vector<Atom> atoms);
    // Same, with log weights; normalization by max subtraction.
    static AtomicMeasure from_log_atoms(const std::vector<double>& locations,
                                        const std::vector<double>& log_weights);
    static AtomicMeasure point_mass();
    // (delta_{-1} + delta_{+1}) / 2.
    static AtomicMeasure ising();

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

private:
    std::vector<Atom> atoms_;
};

constexpr double kAtomMergeTolerance = 1e-12;

// Exact law of sum_x s_x / 2^(n a/2) under the Gibbs weight, by enumeration.
// Throws BudgetExceeded above max_configs configurations.
AtomicMeasure enumerate_total_spin(int n, const AtomicMeasure& nu, double beta, double a,
                                   std::int64_t max_configs = 1 << 20);

// One block step of the measure map with pair weight e^{beta s t}.
AtomicMeasure rg_step_atomic(const AtomicMeasure& nu, double beta, double a);

// Largest atom-wise weight difference; infinity when supports differ by more than loc_tol.
double max_atom_error(const AtomicMeasure& p, const AtomicMeasure& q, double loc_tol = 1e-9);
// Total variation distance on matched atoms; infinity when supports differ.
double total_variation(const AtomicMeasure& p, const AtomicMeasure& q, double loc_tol = 1e-9);

}  // namespace dyson
