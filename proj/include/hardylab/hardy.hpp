#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hardylab/grid.hpp"
#include "hardylab/stepfn.hpp"

namespace hardylab {

namespace detail {

// real roots of q2 x^2 + q1 x + q0, appended to out
inline void poly_roots(double q2, double q1, double q0, std::vector<double>& out) {
    if (q2 == 0.0) {
        if (q1 != 0.0) out.push_back(-q0 / q1);
        return;
    }
    const double disc = q1 * q1 - 4.0 * q2 * q0;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    // Citardauq pairing avoids cancellation
    const double t = -0.5 * (q1 + std::copysign(sq, q1));
    out.push_back(t / q2);
    if (t != 0.0) out.push_back(q0 / t);
}

/// Exact/adaptive integral of max(c1/r, c2, |P(r)|/r)^p over a positive cell,
/// P(r) = a0 + a1 r + a2 r^2. The three branches only cross at closed-form
/// points, so the max is a single smooth branch between consecutive cuts.
inline Quad hardy_cell(double lo, double hi, double c1, double c2, double a0, double a1,
                       double a2, double p) {
    Quad out;
    if (!(lo < hi)) return out;
    std::vector<double> cuts{lo, hi};
    poly_roots(a2, a1, a0, cuts);
    if (c1 > 0.0) {
        poly_roots(a2, a1, a0 - c1, cuts);
        poly_roots(a2, a1, a0 + c1, cuts);
    }
    if (c2 > 0.0) {
        poly_roots(a2, a1 - c2, a0, cuts);
        poly_roots(a2, a1 + c2, a0, cuts);
    }
    if (c1 > 0.0 && c2 > 0.0) cuts.push_back(c1 / c2);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double a, double b) { return std::fabs(a - b) <= 1e-15 * hi; }),
               cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double x0 = std::max(lo, cuts[k]);
        const double x1 = std::min(hi, cuts[k + 1]);
        if (!(x0 < x1)) continue;
        const double mid = 0.5 * (x0 + x1);
        const double v1 = c1 > 0.0 ? c1 / mid : 0.0;
        const double v2 = c2;
        const double v3 = std::fabs(a0 + mid * (a1 + mid * a2)) / mid;
        if (v1 >= v2 && v1 >= v3) {
            out.value += std::pow(c1, p) * power_int(-p, x0, x1);
        } else if (v2 >= v3) {
            out.value += std::pow(c2, p) * (x1 - x0);
        } else if (p == 2.0) {
            // (P/r)^2 expands into powers r^{-2}..r^{2}
            const double q[5] = {a0 * a0, 2.0 * a0 * a1, a1 * a1 + 2.0 * a0 * a2,
                                 2.0 * a1 * a2, a2 * a2};
            for (int j = 0; j < 5; ++j)
                if (q[j] != 0.0) out.value += q[j] * power_int(double(j) - 2.0, x0, x1);
        } else {
            Quad piece = integrate_adaptive(
                [&](double r) {
                    return std::pow(std::fabs(a0 + r * (a1 + r * a2)) / r, p);
                },
                x0, x1, 1e-13);
            out += piece;
        }
    }
    out.err += std::fabs(out.value) * 1e-14;
    return out;
}

// prefix maxima of |u| and suffix maxima of |u_i|/r_i
inline void hardy_scans(const GridFunction& u, std::vector<double>& A, std::vector<double>& B) {
    const std::size_t n = u.size();
    A.resize(n);
    B.resize(n);
    A[0] = std::fabs(u.values[0]);
    for (std::size_t i = 1; i < n; ++i) A[i] = std::max(A[i - 1], std::fabs(u.values[i]));
    B[n - 1] = std::fabs(u.values[n - 1]) / u.grid.nodes[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        B[i] = std::max(B[i + 1], std::fabs(u.values[i]) / u.grid.nodes[i]);
}

}  // namespace detail

enum class Side { left, right };

/// int_0^inf |u(r)|^p / r^p dr. Requires the admissible-class behavior at the
/// origin (linear ramp or vanishing first value); a constant nonzero value at
/// the origin makes u(r)/r fail p-integrability and is flagged divergent.
inline Quad classical_lhs(const GridFunction& u, double p) {
    if (!(p > 1.0) || !(p <= 64.0)) throw std::invalid_argument("p must lie in (1, 64]");
    Quad out;
    const auto& n = u.grid.nodes;
    const double u1 = u.values.front(), uN = u.values.back();
    switch (u.ext) {
        case Extension::linear_to_zero_at_origin:
            out.value += std::pow(std::fabs(u1) / n.front(), p) * n.front();
            break;
        case Extension::zero_outside:
            break;
        case Extension::constant_outside:
            if (u1 != 0.0) return Quad::diverged();
            break;
    }
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        double a, b;
        u.cell_line(i, a, b);
        out += detail::hardy_cell(n[i], n[i + 1], 0.0, 0.0, a, b, 0.0, p);
    }
    if (u.ext != Extension::zero_outside && uN != 0.0)
        out.value += std::pow(std::fabs(uN), p) * std::pow(n.back(), 1.0 - p) / (p - 1.0);
    return out;
}

/// int_0^inf max{ sup_{s<=r} |u(s)|^p / r^p, sup_{s>=r} |u(s)|^p / s^p } dr.
/// Per cell the integrand is max(A_i/r, B_{i+1}, |u(r)|/r)^p: both running
/// sups contribute the same partial term |u(r)|/r inside the cell.
inline Quad improved_lhs(const GridFunction& u, double p) {
    if (!(p > 1.0) || !(p <= 64.0)) throw std::invalid_argument("p must lie in (1, 64]");
    Quad out;
    const auto& n = u.grid.nodes;
    std::vector<double> A, B;
    detail::hardy_scans(u, A, B);
    if (u.ext == Extension::constant_outside && u.values.front() != 0.0)
        return Quad::diverged();
    out.value += std::pow(B.front(), p) * n.front();
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        double a, b;
        u.cell_line(i, a, b);
        out += detail::hardy_cell(n[i], n[i + 1], A[i], B[i + 1], a, b, 0.0, p);
    }
    out.value += std::pow(A.back(), p) * std::pow(n.back(), 1.0 - p) / (p - 1.0);
    return out;
}

/// One-sided variants: left integrates (sup_{s<=r}|u|)^p r^{-p}, right
/// integrates (sup_{s>=r}|u(s)|/s)^p.
inline Quad one_sided_lhs(const GridFunction& u, double p, Side side) {
    if (!(p > 1.0) || !(p <= 64.0)) throw std::invalid_argument("p must lie in (1, 64]");
    Quad out;
    const auto& n = u.grid.nodes;
    std::vector<double> A, B;
    detail::hardy_scans(u, A, B);
    const double u1 = u.values.front(), uN = u.values.back();
    if (u.ext == Extension::constant_outside && u1 != 0.0) return Quad::diverged();
    if (side == Side::left) {
        if (u.ext == Extension::linear_to_zero_at_origin)
            out.value += std::pow(std::fabs(u1) / n.front(), p) * n.front();
        for (std::size_t i = 0; i + 1 < n.size(); ++i) {
            double a, b;
            u.cell_line(i, a, b);
            out += detail::hardy_cell(n[i], n[i + 1], A[i], 0.0, a, b, 0.0, p);
        }
        out.value += std::pow(A.back(), p) * std::pow(n.back(), 1.0 - p) / (p - 1.0);
    } else {
        out.value += std::pow(B.front(), p) * n.front();
        for (std::size_t i = 0; i + 1 < n.size(); ++i) {
            double a, b;
            u.cell_line(i, a, b);
            out += detail::hardy_cell(n[i], n[i + 1], 0.0, B[i + 1], a, b, 0.0, p);
        }
        if (u.ext != Extension::zero_outside && uN != 0.0)
            out.value += std::pow(std::fabs(uN), p) * std::pow(n.back(), 1.0 - p) / (p - 1.0);
    }
    return out;
}

namespace detail {

// shared core of the integral-form functional: nodes xs with exact values of
// G = int_0^x f and per-cell quadratic coefficients of G
struct PrefixIntegralMesh {
    std::vector<double> xs, G;
    std::vector<double> A0, A1, A2;  // per cell, G(r) = A0 + A1 r + A2 r^2
    double head_value = 0.0;         // G at xs.front()
    bool tail_divergent = false;
};

inline Quad integral_form_core(const PrefixIntegralMesh& m, double p) {
    Quad out;
    if (m.tail_divergent) return Quad::diverged();
    const std::size_t n = m.xs.size();
    std::vector<double> PA(n), SB(n);
    PA[0] = std::fabs(m.G[0]);
    for (std::size_t i = 1; i < n; ++i) PA[i] = std::max(PA[i - 1], std::fabs(m.G[i]));
    SB[n - 1] = std::fabs(m.G[n - 1]) / m.xs[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        SB[i] = std::max(SB[i + 1], std::fabs(m.G[i]) / m.xs[i]);
    out.value += std::pow(SB[0], p) * m.xs[0];
    for (std::size_t i = 0; i + 1 < n; ++i)
        out += hardy_cell(m.xs[i], m.xs[i + 1], PA[i], SB[i + 1], m.A0[i], m.A1[i], m.A2[i], p);
    out.value += std::pow(PA[n - 1], p) * std::pow(m.xs[n - 1], 1.0 - p) / (p - 1.0);
    return out;
}

}  // namespace detail

/// Theorem-2.1 functional int_0^inf sup_s |min(1/r,1/s) int_0^s f|^p dr for a
/// piecewise-linear f. The node set is refined with the zeros of f (extrema
/// of G) and with the interior extrema of G(s)/s, making every scan exact.
inline Quad integral_form_lhs(const GridFunction& f, double p) {
    if (!(p > 1.0) || !(p <= 64.0)) throw std::invalid_argument("p must lie in (1, 64]");
    detail::PrefixIntegralMesh m;
    const auto& n = f.grid.nodes;
    double G0 = 0.0;
    switch (f.ext) {
        case Extension::zero_outside: G0 = 0.0; break;
        case Extension::constant_outside: G0 = f.values.front() * n.front(); break;
        case Extension::linear_to_zero_at_origin: G0 = 0.5 * f.values.front() * n.front(); break;
    }
    if (f.ext == Extension::constant_outside && f.values.back() != 0.0) m.tail_divergent = true;
    if (f.ext == Extension::linear_to_zero_at_origin && f.values.back() != 0.0)
        m.tail_divergent = true;
    // pass 1: nodes plus zeros of f, exact G by the cell antiderivative
    std::vector<double> xs{n.front()};
    std::vector<double> Gv{G0};
    std::vector<double> a0s, a1s, a2s;
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        double af, bf;
        f.cell_line(i, af, bf);
        const double gl = Gv.back();
        const double A2 = 0.5 * bf;
        const double A1 = af;
        const double A0 = gl - af * n[i] - 0.5 * bf * n[i] * n[i];
        auto push = [&](double x) {
            xs.push_back(x);
            Gv.push_back(A0 + x * (A1 + x * A2));
            a0s.push_back(A0);
            a1s.push_back(A1);
            a2s.push_back(A2);
        };
        if (bf != 0.0) {
            const double z = -af / bf;
            if (z > n[i] * (1.0 + 1e-15) && z < n[i + 1] * (1.0 - 1e-15)) push(z);
        }
        push(n[i + 1]);
    }
    // pass 2: interior extrema of G(s)/s at s = sqrt(A0/A2)
    m.xs.push_back(xs[0]);
    m.G.push_back(Gv[0]);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double A0 = a0s[i], A1 = a1s[i], A2 = a2s[i];
        if (A2 != 0.0 && A0 / A2 > 0.0) {
            const double s = std::sqrt(A0 / A2);
            if (s > xs[i] * (1.0 + 1e-15) && s < xs[i + 1] * (1.0 - 1e-15)) {
                m.xs.push_back(s);
                m.G.push_back(A0 + s * (A1 + s * A2));
                m.A0.push_back(A0);
                m.A1.push_back(A1);
                m.A2.push_back(A2);
            }
        }
        m.xs.push_back(xs[i + 1]);
        m.G.push_back(Gv[i + 1]);
        m.A0.push_back(A0);
        m.A1.push_back(A1);
        m.A2.push_back(A2);
    }
    return detail::integral_form_core(m, p);
}

/// Same functional for a step-function carrier (G is exactly piecewise linear).
inline Quad integral_form_lhs(const StepFunction& f, double p) {
    if (!(p > 1.0) || !(p <= 64.0)) throw std::invalid_argument("p must lie in (1, 64]");
    detail::PrefixIntegralMesh m;
    double acc = 0.0;
    if (f.edges.front() > 0.0) {
        m.xs.push_back(f.edges.front());
        m.G.push_back(0.0);
    }
    for (std::size_t i = 0; i < f.cells(); ++i) {
        const double lo = f.edges[i], hi = f.edges[i + 1];
        if (m.xs.empty()) {  // first edge at 0: start the mesh at the cell end
            acc += f.values[i] * (hi - lo);
            m.xs.push_back(hi);
            m.G.push_back(acc);
            continue;
        }
        m.A1.push_back(f.values[i]);
        m.A0.push_back(acc - f.values[i] * lo);
        m.A2.push_back(0.0);
        acc += f.values[i] * (hi - lo);
        m.xs.push_back(hi);
        m.G.push_back(acc);
    }
    if (m.xs.size() < 2) {  // single cell starting at zero: nothing between nodes
        m.xs.insert(m.xs.begin(), 0.5 * m.xs.front());
        m.G.insert(m.G.begin(), f.values.front() * m.xs.front());
        m.A0.push_back(0.0);
        m.A1.push_back(f.values.front());
        m.A2.push_back(0.0);
    }
    return detail::integral_form_core(m, p);
}

/// Both sides of the nonincreasing-kernel identity
/// sup_s min(1/r,1/s) int_0^s f* = (1/r) int_0^r f*.
struct KernelCheck {
    double lhs, rhs;
};

inline KernelCheck sup_kernel_identity_check(const StepFunction& fstar, double r) {
    if (!fstar.nonnegative() || !fstar.nonincreasing())
        throw std::invalid_argument("kernel identity needs a nonincreasing nonnegative input");
    if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
    double lhs = 0.0;
    auto consider = [&](double s) {
        if (s <= 0.0) return;
        lhs = std::max(lhs, std::min(1.0 / r, 1.0 / s) * fstar.prefix_integral(s));
    };
    for (double e : fstar.edges) consider(e);
    consider(r);
    const double rhs = fstar.prefix_integral(r) / r;
    return {lhs, rhs};
}

/// int_0^s |f| with the piecewise-linear reading, exact per cell.
inline double abs_prefix_integral(const GridFunction& f, double s) {
    const auto& n = f.grid.nodes;
    double acc = 0.0;
    if (s <= n.front()) {
        switch (f.ext) {
            case Extension::zero_outside: return 0.0;
            case Extension::constant_outside: return std::fabs(f.values.front()) * s;
            case Extension::linear_to_zero_at_origin:
                return 0.5 * std::fabs(f.values.front()) / n.front() * s * s;
        }
    }
    switch (f.ext) {
        case Extension::zero_outside: break;
        case Extension::constant_outside: acc += std::fabs(f.values.front()) * n.front(); break;
        case Extension::linear_to_zero_at_origin:
            acc += 0.5 * std::fabs(f.values.front()) * n.front();
            break;
    }
    for (std::size_t i = 0; i + 1 < n.size() && n[i] < s; ++i) {
        const double hi = std::min(s, n[i + 1]);
        const double v0 = f.values[i], v1 = f(hi);
        const double h = hi - n[i];
        if (v0 * v1 >= 0.0) {
            acc += 0.5 * (std::fabs(v0) + std::fabs(v1)) * h;
        } else {
            acc += 0.5 * (v0 * v0 + v1 * v1) * h / (std::fabs(v0) + std::fabs(v1));
        }
    }
    if (s > n.back() && f.ext == Extension::constant_outside)
        acc += std::fabs(f.values.back()) * (s - n.back());
    return acc;
}

/// All left/right sides of the four inequalities for one u, with the hold
/// flags recomputed from the stored numbers on demand.
struct HardyReport {
    double p = 2.0;
    Quad classical, improved, left_sided, right_sided, energy;

    double sharp_factor() const { return std::pow(p / (p - 1.0), p); }
    double bound() const { return sharp_factor() * energy.value; }

    static bool le_with_tol(double lhs, double rhs) {
        if (std::isinf(rhs)) return true;
        if (std::isinf(lhs)) return false;
        return lhs <= rhs + 1e-9 * std::max(std::fabs(lhs), std::fabs(rhs));
    }
    bool holds_classical() const { return le_with_tol(classical.value, bound()); }
    bool holds_improved() const { return le_with_tol(improved.value, bound()); }
    bool holds_left() const { return le_with_tol(left_sided.value, bound()); }
    bool holds_right() const { return le_with_tol(right_sided.value, bound()); }
    /// the max dominates each single sup
    bool dominance_ok() const {
        const double scale = std::fabs(improved.value);
        const double tol = 1e-12 * std::max(scale, 1e-300);
        return improved.value + tol >= classical.value && improved.value + tol >= left_sided.value &&
               improved.value + tol >= right_sided.value;
    }
};

inline HardyReport verify(const GridFunction& u, double p) {
    HardyReport r;
    r.p = p;
    r.classical = classical_lhs(u, p);
    r.improved = improved_lhs(u, p);
    r.left_sided = one_sided_lhs(u, p, Side::left);
    r.right_sided = one_sided_lhs(u, p, Side::right);
    r.energy = lp_energy(u, p);
    return r;
}

}  // namespace hardylab
