#pragma once

namespace dyson {

// Exponent a of the coupling decay and the constants derived from it.
struct ModelParams {
    double a = 1.25;
    double kappa = 0.625;
    double sigma = 0.0;        // variance of the Gaussian fixed point
    double gamma_scale = 0.0;  // sqrt(1 - 2^(a-2))
    double epsilon = 0.0;      // a - 3/2

    ModelParams() : ModelParams(1.25) {}
    // Throws DomainError unless 1 < a < 2.
    explicit ModelParams(double a);

    // Block normalization 2^(a/2).
    double block_ratio() const;
    // Scale c = 2^((2-a)/2) of the density map.
    double contraction() const;
    // Hermite scale for which G_{2j} p*_0 are the exact eigenfunctions of the
    // linearization at p*_0.
    double eigen_gamma_scale() const;
};

struct GridSpec {
    double half_width = 10.0;
    int n = 2048;  // number of intervals; nodes are i = 0..n

    double spacing() const { return 2.0 * half_width / n; }
    double node(int i) const { return -half_width + spacing() * i; }
    int center() const { return n / 2; }
    int half_size() const { return n / 2 + 1; }
    // Throws DomainError for odd or tiny n, or non-positive width.
    void validate() const;

    bool operator==(const GridSpec& o) const { return half_width == o.half_width && n == o.n; }
};

}  // namespace dyson
