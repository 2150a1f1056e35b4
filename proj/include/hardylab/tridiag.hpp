#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hardylab {

/// Symmetric tridiagonal matrix: diag[i] on the diagonal, off[i] coupling
/// i and i+1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
};

/// Thomas solve T x = b for an SPD tridiagonal T.
inline std::vector<double> solve(const SymTridiag& t, std::vector<double> b) {
    const std::size_t n = t.size();
    std::vector<double> c(n - 1), d(n);
    d[0] = t.diag[0];
    if (d[0] == 0.0) throw std::invalid_argument("singular tridiagonal system");
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = t.off[i - 1] / d[i - 1];
        d[i] = t.diag[i] - t.off[i - 1] * c[i - 1];
        if (d[i] == 0.0) throw std::invalid_argument("singular tridiagonal system");
        b[i] -= c[i - 1] * b[i - 1];
    }
    b[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) b[i] = b[i] / d[i] - c[i] * b[i + 1];
    return b;
}

/// Number of eigenvalues of the pencil (A, B) below lam, via the inertia of
/// the LDL^T factorization of A - lam B. B must be positive definite.
inline int inertia_below(const SymTridiag& a, const SymTridiag& b, double lam) {
    const std::size_t n = a.size();
    int count = 0;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a.diag[i] - lam * b.diag[i];
        if (i > 0) {
            const double e = a.off[i - 1] - lam * b.off[i - 1];
            d -= e * e / prev;
        }
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
        prev = d;
    }
    return count;
}

/// Smallest generalized eigenvalue of (A, B), B SPD, by inertia bisection.
inline double smallest_generalized_eig(const SymTridiag& a, const SymTridiag& b) {
    double hi = 1.0;
    while (inertia_below(a, b, hi) < 1) {
        hi *= 4.0;
        if (hi > 1e300) throw std::runtime_error("eigenvalue bracket overflow");
    }
    double lo = -1.0;
    while (inertia_below(a, b, lo) > 0) {
        lo *= 4.0;
        if (lo < -1e300) throw std::runtime_error("eigenvalue bracket overflow");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inertia_below(a, b, mid) >= 1)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace hardylab
