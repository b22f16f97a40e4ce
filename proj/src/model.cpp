#include "dyson/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dyson/error.hpp"
#include "dyson/parallel.hpp"

namespace dyson {

double hierarchical_distance(std::int64_t x, std::int64_t y, int n) {
    if (n < 0 || n > 62) throw DomainError("level count out of range");
    std::int64_t size = std::int64_t{1} << n;
    if (x < 1 || y < 1 || x > size || y > size) {
        throw DomainError("site index out of range for V_" + std::to_string(n));
    }
    auto diff = static_cast<std::uint64_t>((x - 1) ^ (y - 1));
    if (diff == 0) return 0.0;
    int j = std::bit_width(diff);
    return std::ldexp(1.0, j - 1);
}

double hamiltonian(const std::vector<double>& config, double a) {
    if (!(a > 0.0)) throw DomainError("hamiltonian needs a > 0");
    std::size_t size = config.size();
    if (size == 0 || !std::has_single_bit(size)) {
        throw DomainError("configuration length must be a power of two");
    }
    int n = std::bit_width(size) - 1;
    double h = 0.0;
    for (std::size_t x = 0; x < size; ++x) {
        for (std::size_t y = x + 1; y < size; ++y) {
            double d = hierarchical_distance(x + 1, y + 1, n);
            h -= config[x] * config[y] / std::pow(d, a);
        }
    }
    return h;
}

namespace {

struct LogAtom {
    double location;
    double log_weight;
};

// Sorts, merges by location and returns normalized atoms.
std::vector<Atom> merge_log_atoms(std::vector<LogAtom> raw) {
    std::stable_sort(raw.begin(), raw.end(),
                     [](const LogAtom& l, const LogAtom& r) { return l.location < r.location; });
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& a : raw) mx = std::max(mx, a.log_weight);
    if (!std::isfinite(mx)) throw DomainError("atomic measure has no mass");

    std::vector<Atom> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        double start = raw[i].location;
        double loc_sum = 0.0, w_sum = 0.0;
        std::size_t j = i;
        while (j < raw.size() && raw[j].location - start <= kAtomMergeTolerance) {
            double w = std::exp(raw[j].log_weight - mx);
            loc_sum += raw[j].location;
            w_sum += w;
            ++j;
        }
        out.push_back({loc_sum / static_cast<double>(j - i), w_sum});
        i = j;
    }
    double total = 0.0;
    for (const auto& a : out) total += a.weight;
    for (auto& a : out) a.weight /= total;
    out.erase(std::remove_if(out.begin(), out.end(), [](const Atom& a) { return a.weight <= 0.0; }),
              out.end());
    return out;
}

void check_symmetric(const std::vector<Atom>& atoms) {
    std::size_t n = atoms.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Atom& l = atoms[i];
        const Atom& r = atoms[n - 1 - i];
        if (std::fabs(l.location + r.location) > 1e-9 ||
            std::fabs(l.weight - r.weight) > 1e-9 * std::max(l.weight, r.weight) + 1e-300) {
            throw DomainError("atomic measure is not symmetric under s -> -s");
        }
    }
}

// Symmetrize exactly after the check: mirror the upper half.
void mirror(std::vector<Atom>& atoms) {
    std::size_t n = atoms.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const Atom& r = atoms[n - 1 - i];
        atoms[i] = {-r.location, r.weight};
    }
    if (n % 2 == 1) atoms[n / 2].location = 0.0;
}

}  // namespace

AtomicMeasure AtomicMeasure::from_log_atoms(const std::vector<double>& locations,
                                            const std::vector<double>& log_weights) {
    if (locations.size() != log_weights.size() || locations.empty()) {
        throw DomainError("atom locations and weights must be nonempty and aligned");
    }
    std::vector<LogAtom> raw(locations.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(locations[i]) || std::isnan(log_weights[i])) {
            throw DomainError("atom with non-finite location or weight");
        }
        raw[i] = {locations[i], log_weights[i]};
    }
    AtomicMeasure m;
    m.atoms_ = merge_log_atoms(std::move(raw));
    check_symmetric(m.atoms_);
    mirror(m.atoms_);
    return m;
}

AtomicMeasure AtomicMeasure::from_atoms(std::vector<Atom> atoms) {
    std::vector<double> loc, lw;
    for (const auto& a : atoms) {
        if (!(a.weight > 0.0)) throw DomainError("atom weights must be positive");
        loc.push_back(a.location);
        lw.push_back(std::log(a.weight));
    }
    return from_log_atoms(loc, lw);
}

AtomicMeasure AtomicMeasure::point_mass() { return from_atoms({{0.0, 1.0}}); }

AtomicMeasure AtomicMeasure::ising() { return from_atoms({{-1.0, 0.5}, {1.0, 0.5}}); }

AtomicMeasure enumerate_total_spin(int n, const AtomicMeasure& nu, double beta, double a,
                                   std::int64_t max_configs) {
    if (n < 0) throw DomainError("level count must be nonnegative");
    if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
    if (!(a > 0.0)) throw DomainError("a must be positive");
    const auto& atoms = nu.atoms();
    const std::int64_t k = static_cast<std::int64_t>(atoms.size());
    const int sites = 1 << std::min(n, 30);
    if (n > 30) throw BudgetExceeded("volume too large to enumerate");

    double log_count = sites * std::log(static_cast<double>(k));
    if (log_count > std::log(static_cast<double>(max_configs)) + 1e-12) {
        throw BudgetExceeded("enumeration needs " + std::to_string(k) + "^" +
                             std::to_string(sites) + " configurations");
    }
    std::int64_t total = 1;
    for (int s = 0; s < sites; ++s) total *= k;

    std::vector<double> log_nu(k);
    for (std::int64_t i = 0; i < k; ++i) log_nu[i] = std::log(atoms[i].weight);
    const double ratio = std::pow(2.0, a / 2.0);
    const double scale = std::pow(2.0, -n * a / 2.0);

    // Blocks of configurations in fixed order; each block fills its own slice.
    const std::int64_t block = std::max<std::int64_t>(1, total / 64);
    const int nblocks = static_cast<int>((total + block - 1) / block);
    std::vector<std::vector<LogAtom>> parts(nblocks);
    parallel_for(nblocks, [&](int b) {
        std::vector<double> spins(sites), level(sites);
        std::vector<int> digit(sites);
        std::int64_t lo = b * block, hi = std::min(total, lo + block);
        auto& out = parts[b];
        out.reserve(hi - lo);
        for (std::int64_t c = lo; c < hi; ++c) {
            std::int64_t code = c;
            double lw = 0.0;
            for (int s = 0; s < sites; ++s) {
                digit[s] = static_cast<int>(code % k);
                code /= k;
                spins[s] = atoms[digit[s]].location;
                lw += log_nu[digit[s]];
            }
            // -beta H through the block recursion on normalized block spins.
            double energy = 0.0;
            int m = sites;
            for (int s = 0; s < m; ++s) level[s] = spins[s];
            while (m > 1) {
                for (int u = 0; u < m / 2; ++u) {
                    energy += level[2 * u] * level[2 * u + 1];
                    level[u] = (level[2 * u] + level[2 * u + 1]) / ratio;
                }
                m /= 2;
            }
            double sum = 0.0;
            for (int s = 0; s < sites; ++s) sum += spins[s];
            out.push_back({sum * scale, lw + beta * energy});
        }
    });
    std::vector<LogAtom> raw;
    raw.reserve(total);
    for (auto& p : parts) raw.insert(raw.end(), p.begin(), p.end());

    std::vector<double> loc(raw.size()), lw(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        loc[i] = raw[i].location;
        lw[i] = raw[i].log_weight;
    }
    return AtomicMeasure::from_log_atoms(loc, lw);
}

AtomicMeasure rg_step_atomic(const AtomicMeasure& nu, double beta, double a) {
    if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
    if (!(a > 0.0)) throw DomainError("a must be positive");
    const double ratio = std::pow(2.0, a / 2.0);
    const auto& atoms = nu.atoms();
    std::vector<double> loc, lw;
    loc.reserve(atoms.size() * atoms.size());
    lw.reserve(atoms.size() * atoms.size());
    for (const auto& s : atoms) {
        for (const auto& t : atoms) {
            loc.push_back((s.location + t.location) / ratio);
            lw.push_back(std::log(s.weight) + std::log(t.weight) +
                         beta * s.location * t.location);
        }
    }
    return AtomicMeasure::from_log_atoms(loc, lw);
}

namespace {

template <class F>
double matched_fold(const AtomicMeasure& p, const AtomicMeasure& q, double loc_tol, F f) {
    if (p.size() != q.size()) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Atom& x = p.atoms()[i];
        const Atom& y = q.atoms()[i];
        if (std::fabs(x.location - y.location) > loc_tol) {
            return std::numeric_limits<double>::infinity();
        }
        acc = f(acc, std::fabs(x.weight - y.weight));
    }
    return acc;
}

}  // namespace

double max_atom_error(const AtomicMeasure& p, const AtomicMeasure& q, double loc_tol) {
    return matched_fold(p, q, loc_tol, [](double acc, double d) { return std::max(acc, d); });
}

double total_variation(const AtomicMeasure& p, const AtomicMeasure& q, double loc_tol) {
    return 0.5 * matched_fold(p, q, loc_tol, [](double acc, double d) { return acc + d; });
}

}  // namespace dyson
