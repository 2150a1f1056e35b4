#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardylab/quad.hpp"

namespace hardylab {

/// One additive power-log term c * r^a * (ln r)^b.
struct Term {
    double c = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// A segment (lo, hi] carrying a sum of power-log terms. Weights built from
/// a single term per segment cover everything in the basic inequalities;
/// sums only show up in Schroedinger potentials like c1/r^2 + c2/(r^2 ln^2 r).
struct Segment {
    double lo = 0.0;
    double hi = kInf;
    std::vector<Term> terms;
};

/// Piecewise power-log analytic weight on (0, inf). Segments tile the
/// halfline without gaps or overlap; evaluation at a shared boundary uses
/// the left segment.
class WeightSpec {
  public:
    WeightSpec() = default;
    explicit WeightSpec(std::vector<Segment> segments) : segments_(std::move(segments)) {
        validate();
    }

    static WeightSpec zero() { return WeightSpec({{0.0, kInf, {{0.0, 0.0, 0.0}}}}); }
    static WeightSpec unit() { return WeightSpec({{0.0, kInf, {{1.0, 0.0, 0.0}}}}); }
    /// c * r^a on all of (0, inf).
    static WeightSpec power(double c, double a) {
        return WeightSpec({{0.0, kInf, {{c, a, 0.0}}}});
    }
    /// c * r^a * (ln r)^b on (lo, hi), zero elsewhere.
    static WeightSpec windowed(double c, double a, double b, double lo, double hi) {
        std::vector<Segment> segs;
        if (lo > 0.0) segs.push_back({0.0, lo, {{0.0, 0.0, 0.0}}});
        segs.push_back({lo, hi, {{c, a, b}}});
        if (hi < kInf) segs.push_back({hi, kInf, {{0.0, 0.0, 0.0}}});
        return WeightSpec(std::move(segs));
    }

    const std::vector<Segment>& segments() const { return segments_; }

    bool is_zero() const {
        for (const auto& s : segments_)
            for (const auto& t : s.terms)
                if (t.c != 0.0) return false;
        return true;
    }

    /// Index of the segment owning r (left segment at a shared boundary).
    std::size_t segment_index(double r) const {
        std::size_t lo = 0, hi = segments_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (segments_[mid].hi >= r)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    double operator()(double r) const {
        if (!(r > 0.0)) throw std::invalid_argument("weight evaluated at r <= 0");
        const Segment& s = segments_[segment_index(r)];
        double v = 0.0;
        const double t = std::log(r);
        for (const auto& tm : s.terms) {
            if (tm.c == 0.0) continue;
            double term = tm.c * std::pow(r, tm.a);
            if (tm.b != 0.0) term *= std::pow(t, tm.b);
            v += term;
        }
        return v;
    }

    /// All finite positive segment boundaries.
    std::vector<double> breakpoints() const {
        std::vector<double> bp;
        for (const auto& s : segments_) {
            if (s.lo > 0.0) bp.push_back(s.lo);
        }
        return bp;
    }

    WeightSpec scaled(double t) const {
        if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("scale factor must be finite and >= 0");
        WeightSpec out = *this;
        for (auto& s : out.segments_)
            for (auto& tm : s.terms) tm.c *= t;
        return out;
    }

    /// Weight restricted to (lo, hi), zero outside. Used by the interval
    /// constants, which extend their weights by zero per the construction.
    WeightSpec clipped(double lo, double hi) const {
        std::vector<Segment> segs;
        if (lo > 0.0) segs.push_back({0.0, lo, {{0.0, 0.0, 0.0}}});
        for (const auto& s : segments_) {
            const double a = std::max(s.lo, lo);
            const double b = std::min(s.hi, hi);
            if (a < b) segs.push_back({a, b, s.terms});
        }
        if (hi < kInf) segs.push_back({hi, kInf, {{0.0, 0.0, 0.0}}});
        return WeightSpec(std::move(segs));
    }

  private:
    void validate() const {
        if (segments_.empty()) throw std::invalid_argument("weight needs at least one segment");
        if (segments_.front().lo != 0.0)
            throw std::invalid_argument("segments must start at lo = 0");
        if (segments_.back().hi != kInf)
            throw std::invalid_argument("segments must extend to hi = inf");
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const Segment& s = segments_[i];
            if (!(s.lo < s.hi)) throw std::invalid_argument("segment needs lo < hi");
            if (i + 1 < segments_.size() && segments_[i + 1].lo != s.hi)
                throw std::invalid_argument("segments must tile (0,inf) without gaps or overlap");
            if (s.terms.empty()) throw std::invalid_argument("segment needs at least one term");
            for (const auto& t : s.terms) {
                // c = +inf marks the V^{-1/(p-1)} indicator of a vanishing V
                if (!(t.c >= 0.0))
                    throw std::invalid_argument("term coefficient must be >= 0");
                if (!std::isfinite(t.a) || !std::isfinite(t.b))
                    throw std::invalid_argument("term exponents must be finite");
                if (t.b != 0.0 && s.lo < 1.0) {
                    // (ln r)^b must stay real and nonnegative where ln r < 0.
                    const bool even_int =
                        t.b == std::floor(t.b) && std::fmod(std::fabs(t.b), 2.0) == 0.0;
                    if (!even_int)
                        throw std::invalid_argument(
                            "segments reaching below r = 1 need an even integer log exponent");
                    if (s.hi > 1.0 && t.b < 0.0)
                        throw std::invalid_argument(
                            "segments containing r = 1 need a nonnegative log exponent");
                }
            }
        }
    }

    std::vector<Segment> segments_;
};

namespace detail {

// int_lo^hi r^e dr on a finite positive interval; log form at e = -1.
inline double power_int(double e, double lo, double hi) {
    if (e == -1.0) return std::log(hi / lo);
    return (std::pow(hi, e + 1.0) - std::pow(lo, e + 1.0)) / (e + 1.0);
}

// int_{t0}^{t1} e^{g t} t^b dt for finite t0 < t1, smooth away from t = 0.
// A series handles the integrable endpoint singularity when t0 == 0, b in (-1,0).
inline Quad explog_finite(double g, double b, double t0, double t1) {
    Quad out;
    double start = t0;
    if (t0 == 0.0 && b < 0.0) {
        const double delta = std::min(0.25 / (1.0 + std::fabs(g)), 0.5 * (t1 - t0));
        double sum = 0.0, gk = 1.0, kfac = 1.0;
        for (int k = 0; k < 14; ++k) {
            sum += gk / kfac * std::pow(delta, b + k + 1) / (b + k + 1);
            gk *= g;
            kfac *= (k + 1);
        }
        out.value += sum;
        out.err += std::fabs(sum) * 1e-14;
        start = delta;
    }
    if (start < t1) {
        out += integrate_adaptive(
            [g, b](double t) { return std::exp(g * t) * std::pow(t, b); }, start, t1);
    }
    return out;
}

// int e^{g t} t^b dt over a halfline reaching +inf (dir=+1, g<0) or -inf
// (dir=-1, g>0), windowed with an analytic remainder bound. The bound uses
// t^b <= t_edge^b * e^{|g|(t-t_edge)/2} past the edge once |t_edge| is large
// enough, leaving a decaying exponential whose tail integrates in closed form.
inline Quad explog_halfline(double g, double b, double t_from, int dir) {
    Quad out;
    const double gg = std::fabs(g);
    double edge = t_from;
    const double width = std::max(8.0, 4.0 / gg);
    for (int w = 0; w < 200; ++w) {
        const double next = edge + dir * width;
        out += dir > 0 ? explog_finite(g, b, edge, next) : explog_finite(g, b, next, edge);
        edge = next;
        const double at = std::fabs(edge);
        if (b <= 0.0 || at * gg >= 4.0 * std::fabs(b)) {
            const double rem = 4.0 / gg * std::exp(g * edge) * std::pow(at, b);
            if (rem <= 1e-14 * std::fabs(out.value) + 1e-300) {
                out.err += rem;
                return out;
            }
        }
    }
    return out;
}

/// int_lo^hi c r^a (ln r)^b dr with full divergence detection. 0 <= lo < hi <= inf.
inline Quad term_integral(const Term& tm, double lo, double hi) {
    Quad out;
    if (tm.c == 0.0 || !(lo < hi)) return out;
    if (std::isinf(tm.c)) return Quad::diverged();
    const double g = tm.a + 1.0;
    if (tm.b == 0.0) {
        if (tm.a == -1.0) {
            if (lo == 0.0 || std::isinf(hi)) return Quad::diverged();
            out.value = tm.c * std::log(hi / lo);
        } else {
            if (std::isinf(hi) && g > 0.0) return Quad::diverged();
            if (lo == 0.0 && g < 0.0) return Quad::diverged();
            const double upper = std::isinf(hi) ? 0.0 : std::pow(hi, g);
            const double lower = lo == 0.0 ? 0.0 : std::pow(lo, g);
            out.value = tm.c / g * (upper - lower);
        }
        out.err = std::fabs(out.value) * 4e-16;
        return out;
    }
    // log-carrying terms: substitute t = ln r
    const double t0 = lo == 0.0 ? -kInf : std::log(lo);
    const double t1 = std::isinf(hi) ? kInf : std::log(hi);
    if (tm.a == -1.0) {
        // antiderivative (ln r)^{b+1}/(b+1), or ln|ln r| at b = -1
        if (tm.b == -1.0) {
            if (std::isinf(t1) || t0 <= 0.0) return Quad::diverged();
            out.value = tm.c * std::log(t1 / t0);
        } else {
            const double e = tm.b + 1.0;
            if (std::isinf(t1) && e > 0.0) return Quad::diverged();
            if (std::isinf(t0) && e > 0.0) return Quad::diverged();
            if (t0 == 0.0 && e < 0.0) return Quad::diverged();
            if (t1 == 0.0 && e < 0.0) return Quad::diverged();
            const double upper = std::isinf(t1) ? 0.0 : std::pow(t1, e);
            const double lower = std::isinf(t0) ? 0.0 : (t0 == 0.0 ? 0.0 : std::pow(t0, e));
            out.value = tm.c / e * (upper - lower);
        }
        out.err = std::fabs(out.value) * 4e-16;
        return out;
    }
    // general case, numeric in t
    if (std::isinf(t1) && g >= 0.0) return Quad::diverged();
    if (std::isinf(t0) && g <= 0.0) return Quad::diverged();
    if ((t0 == 0.0 || t1 == 0.0) && tm.b <= -1.0) return Quad::diverged();
    Quad acc;
    double a0 = t0, a1 = t1;
    if (std::isinf(t1)) {
        const double edge = std::max(std::isinf(t0) ? 1.0 : t0 + 1.0, 1.0);
        acc += explog_halfline(g, tm.b, edge, +1);
        a1 = edge;
    }
    if (std::isinf(t0)) {
        const double edge = std::min(a1 - 1.0, -1.0);
        acc += explog_halfline(g, tm.b, edge, -1);
        a0 = edge;
    }
    if (a0 < a1) {
        if (a0 < 0.0 && a1 > 0.0) {  // split at r = 1 (b is an even integer here)
            acc += explog_finite(g, tm.b, a0, 0.0);
            acc += explog_finite(g, tm.b, 0.0, a1);
        } else {
            acc += explog_finite(g, tm.b, a0, a1);
        }
    }
    acc.value *= tm.c;
    acc.err *= tm.c;
    return acc;
}

}  // namespace detail

/// Exact/adaptive integral of a weight over (lo, hi); closed form on pure
/// power pieces, log-substituted quadrature otherwise. Divergence comes back
/// as +inf with the flag set.
inline Quad integrate(const WeightSpec& w, double lo, double hi) {
    if (!(lo >= 0.0) || !(lo < hi)) {
        if (lo == hi) return {};
        throw std::invalid_argument("integrate needs 0 <= lo < hi");
    }
    Quad out;
    for (const auto& s : w.segments()) {
        const double a = std::max(s.lo, lo);
        const double b = std::min(s.hi, hi);
        if (!(a < b)) continue;
        for (const auto& t : s.terms) {
            out += detail::term_integral(t, a, b);
            if (out.divergent) return out;
        }
    }
    return out;
}

/// int_lo^hi w(r) * (q0 + q1 r + q2 r^2) dr over a finite interval, used by
/// the quadratic-form assembly. Reduces to shifted power-log integrals.
inline Quad integrate_times_poly(const WeightSpec& w, double lo, double hi, double q0,
                                 double q1, double q2 = 0.0) {
    Quad out;
    if (!(lo < hi)) return out;
    for (const auto& s : w.segments()) {
        const double a = std::max(s.lo, lo);
        const double b = std::min(s.hi, hi);
        if (!(a < b)) continue;
        for (const auto& t : s.terms) {
            if (t.c == 0.0) continue;
            const double qs[3] = {q0, q1, q2};
            for (int j = 0; j < 3; ++j) {
                if (qs[j] == 0.0) continue;
                Term shifted{t.c * qs[j], t.a + j, t.b};
                // qs[j] may be negative; fold the sign through the value
                Term mag{std::fabs(shifted.c), shifted.a, shifted.b};
                Quad piece = detail::term_integral(mag, a, b);
                if (piece.divergent) return Quad::diverged();
                if (shifted.c < 0.0) piece.value = -piece.value;
                out += piece;
            }
        }
    }
    return out;
}

/// Spec of V^{-1/(p-1)}. Segment-wise exponent arithmetic; a vanishing V
/// becomes a +inf indicator that forces divergence downstream.
inline WeightSpec power_of_inverse(const WeightSpec& v, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    const double q = -1.0 / (p - 1.0);
    std::vector<Segment> segs;
    for (const auto& s : v.segments()) {
        if (s.terms.size() != 1)
            throw std::invalid_argument("power_of_inverse needs single-term segments");
        const Term& t = s.terms.front();
        Term out;
        if (t.c == 0.0) {
            out = {kInf, 0.0, 0.0};
        } else {
            out = {std::pow(t.c, q), t.a * q, t.b * q};
        }
        if (out.b != 0.0 && s.lo < 1.0) {
            const bool even_int =
                out.b == std::floor(out.b) && std::fmod(std::fabs(out.b), 2.0) == 0.0;
            if (!even_int || (s.hi > 1.0 && out.b < 0.0))
                throw std::invalid_argument(
                    "V^{-1/(p-1)} has an unrepresentable log exponent below r = 1");
        }
        segs.push_back({s.lo, s.hi, {out}});
    }
    return WeightSpec(std::move(segs));
}

}  // namespace hardylab
