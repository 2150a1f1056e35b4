#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hardylab/weight.hpp"

namespace hardylab {

/// Strictly increasing positive radii; the discretization of (0, inf).
struct LogGrid {
    std::vector<double> nodes;

    LogGrid() = default;
    explicit LogGrid(std::vector<double> n) : nodes(std::move(n)) { validate(); }

    static LogGrid geometric(double lo, double hi, std::size_t n) {
        if (!(lo > 0.0) || !(lo < hi) || n < 2)
            throw std::invalid_argument("geometric grid needs 0 < lo < hi and n >= 2");
        std::vector<double> nodes(n);
        const double step = std::log(hi / lo) / double(n - 1);
        for (std::size_t i = 0; i < n; ++i) nodes[i] = lo * std::exp(double(i) * step);
        nodes.front() = lo;
        nodes.back() = hi;
        return LogGrid(std::move(nodes));
    }

    std::size_t size() const { return nodes.size(); }
    double front() const { return nodes.front(); }
    double back() const { return nodes.back(); }

    /// Cell index i with nodes[i] <= r <= nodes[i+1]; r must lie inside.
    std::size_t cell_index(double r) const {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
        std::size_t i = std::size_t(it - nodes.begin());
        if (i == 0) return 0;
        if (i >= nodes.size()) return nodes.size() - 2;
        return i - 1;
    }

    void validate() const {
        if (nodes.size() < 2) throw std::invalid_argument("grid needs at least two nodes");
        if (!(nodes.front() > 0.0)) throw std::invalid_argument("grid nodes must be positive");
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
            if (!(nodes[i] < nodes[i + 1]) || !std::isfinite(nodes[i + 1]))
                throw std::invalid_argument("grid nodes must be finite, strictly increasing");
    }
};

/// Behavior outside [r_1, r_N].
///  zero_outside:   0 on both sides
///  constant_outside: u(r_1) below, u(r_N) above
///  linear_to_zero_at_origin: linear ramp 0 -> u(r_1) on (0, r_1],
///                            constant u(r_N) above (the admissible-class tag)
enum class Extension { zero_outside, constant_outside, linear_to_zero_at_origin };

/// Piecewise-linear sample values on a LogGrid; the universal function carrier.
struct GridFunction {
    LogGrid grid;
    std::vector<double> values;
    Extension ext = Extension::zero_outside;

    GridFunction() = default;
    GridFunction(LogGrid g, std::vector<double> v, Extension e = Extension::zero_outside)
        : grid(std::move(g)), values(std::move(v)), ext(e) {
        if (values.size() != grid.size())
            throw std::invalid_argument("value count must match grid size");
        for (double x : values)
            if (!std::isfinite(x)) throw std::invalid_argument("values must be finite");
    }

    std::size_t size() const { return values.size(); }

    double operator()(double r) const {
        if (!(r > 0.0)) throw std::invalid_argument("grid function evaluated at r <= 0");
        const auto& n = grid.nodes;
        if (r < n.front()) {
            switch (ext) {
                case Extension::zero_outside: return 0.0;
                case Extension::constant_outside: return values.front();
                case Extension::linear_to_zero_at_origin: return values.front() * r / n.front();
            }
        }
        if (r > n.back())
            return ext == Extension::zero_outside ? 0.0 : values.back();
        const std::size_t i = grid.cell_index(r);
        const double t = (r - n[i]) / (n[i + 1] - n[i]);
        return values[i] * (1.0 - t) + values[i + 1] * t;
    }

    /// Slope and intercept of the linear piece on cell i: u(r) = a + b r.
    void cell_line(std::size_t i, double& a, double& b) const {
        const double h = grid.nodes[i + 1] - grid.nodes[i];
        b = (values[i + 1] - values[i]) / h;
        a = values[i] - b * grid.nodes[i];
    }

    GridFunction scaled(double t) const {
        GridFunction out = *this;
        for (double& v : out.values) v *= t;
        return out;
    }
};

/// Node-wise running maximum from the left; nondecreasing result.
inline GridFunction prefix_sup(const GridFunction& f) {
    GridFunction out = f;
    for (std::size_t i = 1; i < out.values.size(); ++i)
        out.values[i] = std::max(out.values[i], out.values[i - 1]);
    return out;
}

/// Node-wise running maximum from the right; nonincreasing result.
inline GridFunction suffix_sup(const GridFunction& f) {
    GridFunction out = f;
    for (std::size_t i = out.values.size() - 1; i-- > 0;)
        out.values[i] = std::max(out.values[i], out.values[i + 1]);
    return out;
}

/// Pointwise samples of a weight at the grid nodes (zero-outside carrier).
inline GridFunction sample(const WeightSpec& w, const LogGrid& g) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = w(g.nodes[i]);
    return GridFunction(g, std::move(v), Extension::zero_outside);
}

/// int V |u'|^p dr with the constant per-cell slope; exact per cell given the
/// weight integral. Jumps induced by a zero-outside extension with nonzero
/// endpoint values are flagged divergent.
inline Quad lp_energy(const GridFunction& u, double p, const WeightSpec& v = WeightSpec::unit()) {
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    Quad out;
    const auto& n = u.grid.nodes;
    // head
    switch (u.ext) {
        case Extension::zero_outside:
            if (u.values.front() != 0.0) return Quad::diverged();
            break;
        case Extension::constant_outside:
            break;  // zero slope
        case Extension::linear_to_zero_at_origin: {
            const double s = u.values.front() / n.front();
            if (s != 0.0) {
                Quad head = integrate(v, 0.0, n.front());
                if (head.divergent) return Quad::diverged();
                head.value *= std::pow(std::fabs(s), p);
                head.err *= std::pow(std::fabs(s), p);
                out += head;
            }
            break;
        }
    }
    // tail: constant beyond r_N contributes nothing; a jump diverges
    if (u.ext == Extension::zero_outside && u.values.back() != 0.0) return Quad::diverged();
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        const double s = (u.values[i + 1] - u.values[i]) / (n[i + 1] - n[i]);
        if (s == 0.0) continue;
        Quad cell = integrate(v, n[i], n[i + 1]);
        if (cell.divergent) return Quad::diverged();
        const double f = std::pow(std::fabs(s), p);
        out.value += f * cell.value;
        out.err += f * cell.err;
    }
    return out;
}

/// int W |u|^p dr for a spec weight against the piecewise-linear carrier,
/// with the extension pieces included.
inline Quad weighted_p_mass(const GridFunction& u, double p, const WeightSpec& w) {
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    Quad out;
    const auto& n = u.grid.nodes;
    // head piece
    const double u1 = u.values.front();
    if (u1 != 0.0) {
        switch (u.ext) {
            case Extension::zero_outside: break;
            case Extension::constant_outside: {
                Quad q = integrate(w, 0.0, n.front());
                if (q.divergent) return Quad::diverged();
                out.value += std::pow(std::fabs(u1), p) * q.value;
                out.err += std::pow(std::fabs(u1), p) * q.err;
                break;
            }
            case Extension::linear_to_zero_at_origin: {
                // |u1 r / r1|^p = |u1/r1|^p r^p: shift every term by p
                Quad q;
                for (const auto& seg : w.segments()) {
                    const double a = seg.lo, b = std::min(seg.hi, n.front());
                    if (!(a < b)) continue;
                    for (auto t : seg.terms) {
                        t.a += p;
                        q += detail::term_integral(t, a, b);
                    }
                }
                if (q.divergent) return Quad::diverged();
                const double f = std::pow(std::fabs(u1) / n.front(), p);
                out.value += f * q.value;
                out.err += f * q.err;
                break;
            }
        }
    }
    // tail piece (constant u beyond r_N unless zero-outside)
    const double uN = u.values.back();
    if (uN != 0.0 && u.ext != Extension::zero_outside) {
        Quad q = integrate(w, n.back(), kInf);
        if (q.divergent) return Quad::diverged();
        out.value += std::pow(std::fabs(uN), p) * q.value;
        out.err += std::pow(std::fabs(uN), p) * q.err;
    }
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        double a, b;
        u.cell_line(i, a, b);
        if (u.values[i] == 0.0 && u.values[i + 1] == 0.0) continue;
        if (p == 2.0) {
            Quad q = integrate_times_poly(w, n[i], n[i + 1], a * a, 2.0 * a * b, b * b);
            if (q.divergent) return Quad::diverged();
            out += q;
        } else {
            // split at the sign change so |u|^p stays smooth
            std::vector<double> pts{n[i], n[i + 1]};
            if (b != 0.0) {
                const double z = -a / b;
                if (z > n[i] && z < n[i + 1]) pts.insert(pts.begin() + 1, z);
            }
            for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
                Quad q = integrate_adaptive(
                    [&](double r) { return w(r) * std::pow(std::fabs(a + b * r), p); },
                    pts[k], pts[k + 1], 1e-13);
                if (q.divergent) return Quad::diverged();
                out += q;
            }
        }
    }
    return out;
}

}  // namespace hardylab
