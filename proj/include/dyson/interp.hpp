#pragma once

#include <cmath>
#include <limits>

#include "dyson/params.hpp"

namespace dyson {

// Four-point Lagrange stencil on the uniform grid: nodes k-1..k+2 around x.
struct Stencil {
    int k = 0;
    double c[4] = {0, 0, 0, 0};
};

// Returns false when x lies off the grid.
inline bool lagrange_stencil(double x, double half_width, double inv_h, int n, Stencil& st) {
    if (!(std::fabs(x) <= half_width * (1.0 + 1e-14))) return false;
    double idx = (x + half_width) * inv_h;
    int k = static_cast<int>(std::floor(idx));
    if (k < 1) k = 1;
    if (k > n - 2) k = n - 2;
    double f = idx - k;
    st.k = k;
    st.c[0] = -f * (f - 1.0) * (f - 2.0) / 6.0;
    st.c[1] = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    st.c[2] = -(f + 1.0) * f * (f - 2.0) / 2.0;
    st.c[3] = (f + 1.0) * f * (f - 1.0) / 6.0;
    return true;
}

// Interpolates log values; falls back to linear when the stencil touches -inf.
inline double interp_log(const double* lv, double half_width, double inv_h, int n, double x) {
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    Stencil st;
    if (!lagrange_stencil(x, half_width, inv_h, n, st)) return ninf;
    const double* v = lv + st.k - 1;
    if (v[0] > ninf && v[1] > ninf && v[2] > ninf && v[3] > ninf) {
        return st.c[0] * v[0] + st.c[1] * v[1] + st.c[2] * v[2] + st.c[3] * v[3];
    }
    double idx = (x + half_width) * inv_h;
    int k0 = static_cast<int>(std::floor(idx));
    if (k0 < 0) k0 = 0;
    if (k0 > n - 1) k0 = n - 1;
    double f = idx - k0;
    double a = lv[k0], b = lv[k0 + 1];
    if (f <= 0.0) return a;
    if (f >= 1.0) return b;
    if (a == ninf || b == ninf) return ninf;
    return (1.0 - f) * a + f * b;
}

}  // namespace dyson
