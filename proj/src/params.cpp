#include "dyson/params.hpp"

#include <cmath>
#include <string>

#include "dyson/error.hpp"

namespace dyson {

ModelParams::ModelParams(double a_) : a(a_) {
    if (!(a_ > 1.0 && a_ < 2.0)) {
        throw DomainError("exponent a must lie in (1,2), got " + std::to_string(a_));
    }
    kappa = a / 2.0;
    sigma = 1.0 - std::pow(2.0, 1.0 - a);
    gamma_scale = std::sqrt(1.0 - std::pow(2.0, a - 2.0));
    epsilon = a - 1.5;
}

double ModelParams::block_ratio() const { return std::pow(2.0, a / 2.0); }

double ModelParams::contraction() const { return std::pow(2.0, (2.0 - a) / 2.0); }

double ModelParams::eigen_gamma_scale() const {
    return gamma_scale * std::sqrt((1.0 + sigma) / sigma);
}

void GridSpec::validate() const {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw DomainError("grid half-width must be positive");
    }
    if (n < 8 || n % 2 != 0) {
        throw DomainError("grid node count must be even and at least 8");
    }
}

}  // namespace dyson
