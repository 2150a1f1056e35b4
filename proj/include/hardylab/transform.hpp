#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hardylab/constants.hpp"
#include "hardylab/grid.hpp"

namespace hardylab {

/// Lemma 4.1 change of variables: phi(r) = int_0^r V^{-1/(p-1)}, its inverse
/// psi on (0, L), and L = phi(inf). phi is strictly increasing under the
/// integrability hypothesis, which is enforced at construction.
class PhiMap {
  public:
    PhiMap(const WeightSpec& v, double p)
        : p_(p), vinv_(power_of_inverse(v, p)), cum_(vinv_, 0.0, 0.0) {
        for (const auto& seg : vinv_.segments())
            for (const auto& t : seg.terms)
                if (std::isinf(t.c))
                    throw std::invalid_argument("integrability hypothesis fails: V vanishes");
        if (integrate(vinv_, 0.0, 1.0).divergent)
            throw std::invalid_argument(
                "integrability hypothesis fails: int_0 V^{-1/(p-1)} diverges");
        const Quad total = integrate(vinv_, 0.0, kInf);
        L_ = total.divergent ? kInf : total.value;
    }

    double p() const { return p_; }
    double L() const { return L_; }
    const WeightSpec& vinv() const { return vinv_; }

    double phi(double r) const {
        if (!(r > 0.0)) throw std::invalid_argument("phi needs r > 0");
        return cum_(r);
    }

    /// Inverse of phi by monotone bisection; rho must lie in (0, L).
    double psi(double rho) const {
        if (!(rho > 0.0) || !(rho < L_)) throw std::invalid_argument("psi needs rho in (0, L)");
        double lo = 1.0, hi = 1.0;
        while (phi(lo) >= rho) {
            lo *= 0.5;
            if (lo < 1e-300) throw std::runtime_error("psi bracket underflow");
        }
        while (phi(hi) < rho) {
            hi *= 2.0;
            if (hi > 1e300) throw std::runtime_error("psi bracket overflow");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (phi(mid) < rho)
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 1e-15 * hi) break;
        }
        return 0.5 * (lo + hi);
    }

  private:
    double p_;
    WeightSpec vinv_;
    detail::CumFromBase cum_;
    double L_;
};

/// The r -> 1/r mirror behind the infinity-anchored inequalities:
/// W_inv(rho) = W(1/rho) rho^{-2}, V_inv(rho) = V(1/rho) rho^{2p-2}.
/// Exact on exponents; log exponents must be even so (-ln rho)^b = (ln rho)^b.
inline WeightSpec mirror_weight(const WeightSpec& w, double extra_pow) {
    std::vector<Segment> segs;
    const auto& in = w.segments();
    for (std::size_t i = in.size(); i-- > 0;) {
        const Segment& s = in[i];
        Segment m;
        m.lo = std::isinf(s.hi) ? 0.0 : 1.0 / s.hi;
        m.hi = s.lo == 0.0 ? kInf : 1.0 / s.lo;
        for (const auto& t : s.terms) {
            if (t.b != 0.0) {
                const bool even_int =
                    t.b == std::floor(t.b) && std::fmod(std::fabs(t.b), 2.0) == 0.0;
                if (!even_int)
                    throw std::invalid_argument("the r -> 1/r mirror needs even log exponents");
            }
            m.terms.push_back({t.c, -t.a - 2.0 + extra_pow, t.b});
        }
        segs.push_back(std::move(m));
    }
    return WeightSpec(std::move(segs));
}

struct MirrorPair {
    WeightSpec v_inv, w_inv;
};

inline MirrorPair invert_halfline(const WeightSpec& v, const WeightSpec& w, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    return {mirror_weight(v, 2.0 * p), mirror_weight(w, 0.0)};
}

/// int w_pl(r) |u(r)|^p dr for two piecewise-linear carriers on the same grid.
inline Quad pl_weighted_p_mass(const GridFunction& u, double p, const GridFunction& w) {
    Quad out;
    const auto& n = u.grid.nodes;
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        double au, bu, aw, bw;
        u.cell_line(i, au, bu);
        w.cell_line(i, aw, bw);
        out += integrate_adaptive(
            [&](double r) {
                return (aw + bw * r) * std::pow(std::fabs(au + bu * r), p);
            },
            n[i], n[i + 1], 1e-12);
    }
    return out;
}

struct SubstituteResult {
    GridFunction u_tilde;
    GridFunction w_tilde;
    // conservation pairs: int V|u'|^p dr = int |u_tilde'|^p drho and
    // int W|u|^p dr = int w_tilde |u_tilde|^p drho
    Quad energy_r, energy_rho;
    Quad mass_r, mass_rho;
};

/// Resample u and W through the Lemma 4.1 substitution on a log grid in rho.
inline SubstituteResult substitute(const GridFunction& u, const WeightSpec& v,
                                   const WeightSpec& w, double p, std::size_t n_out = 0) {
    PhiMap map(v, p);
    const double rho_lo = map.phi(u.grid.front());
    const double rho_hi = map.phi(u.grid.back());
    if (!(rho_lo > 0.0) || !(rho_lo < rho_hi))
        throw std::invalid_argument("substitute needs a nondegenerate image interval");
    if (n_out == 0) n_out = std::max<std::size_t>(4 * u.size(), 8192);
    // log grid in rho merged with the images of u's nodes and of the weight
    // breakpoints, so every kink lands on a node of the resampled carrier
    std::vector<double> rnodes = LogGrid::geometric(rho_lo, rho_hi, n_out).nodes;
    for (std::size_t i = 0; i < u.size(); ++i) rnodes.push_back(map.phi(u.grid.nodes[i]));
    for (double b : w.breakpoints())
        if (b > u.grid.front() && b < u.grid.back()) rnodes.push_back(map.phi(b));
    for (double b : map.vinv().breakpoints())
        if (b > u.grid.front() && b < u.grid.back()) rnodes.push_back(map.phi(b));
    std::sort(rnodes.begin(), rnodes.end());
    rnodes.erase(std::unique(rnodes.begin(), rnodes.end(),
                             [&](double a, double b) { return b - a <= 1e-14 * rho_hi; }),
                 rnodes.end());
    rnodes.front() = rho_lo;
    rnodes.back() = rho_hi;
    LogGrid rg{std::move(rnodes)};
    const std::size_t m = rg.size();
    std::vector<double> uv(m), wv(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double rho = rg.nodes[i];
        const double r =
            i == 0 ? u.grid.front() : (i + 1 == m ? u.grid.back() : map.psi(rho));
        uv[i] = u(r);
        wv[i] = w(r) / map.vinv()(r);
    }
    SubstituteResult out{
        GridFunction(rg, std::move(uv), u.ext),
        GridFunction(rg, std::move(wv), Extension::zero_outside),
        {}, {}, {}, {}};
    out.energy_r = lp_energy(u, p, v);
    out.mass_r = weighted_p_mass(u, p, w);
    out.energy_rho = lp_energy(out.u_tilde, p);
    out.mass_rho = pl_weighted_p_mass(out.u_tilde, p, out.w_tilde);
    return out;
}

struct LogMapResult {
    GridFunction f;          // f(x) = u(e^x) on x-nodes = ln(r-nodes)
    GridFunction w_sampled;  // w(x) = e^{2x} W(e^x) at the x-nodes
    double energy_lhs, energy_rhs;  // int_R |u'|^2 r dr + c_R|u(R)|^2 vs x-side
    double mass_lhs, mass_rhs;      // int_R W|u|^2 r dr vs int w|f|^2 dx
};

/// Section-7 logarithmic substitution for the two-dimensional reduction.
/// Requires the grid to start at R > 1 and W to vanish below R.
inline LogMapResult log_map(const GridFunction& u, const WeightSpec& w) {
    const double R = u.grid.front();
    if (R < 1.0) throw std::invalid_argument("log map needs R >= 1");
    if (R == 1.0) throw std::invalid_argument("log map needs R > 1 for a positive x-grid");
    if (integrate(w, 0.0, R).value != 0.0)
        throw std::invalid_argument("log map needs W supported in (R, inf)");
    const std::size_t n = u.size();
    std::vector<double> xs(n), wv(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(u.grid.nodes[i]);
        wv[i] = std::exp(2.0 * xs[i]) * w(u.grid.nodes[i]);
    }
    LogGrid xg{std::vector<double>(xs)};
    GridFunction f(xg, u.values, Extension::constant_outside);
    GridFunction ws(xg, std::move(wv), Extension::zero_outside);

    const double X = xs.front();
    double lhs = (1.0 / X) * u.values.front() * u.values.front();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = u.grid.nodes[i], b = u.grid.nodes[i + 1];
        const double s = (u.values[i + 1] - u.values[i]) / (b - a);
        lhs += s * s * 0.5 * (b * b - a * a);
    }
    double rhs = (1.0 / X) * f.values.front() * f.values.front();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = xs[i + 1] - xs[i];
        const double s = (f.values[i + 1] - f.values[i]) / dx;
        rhs += s * s * dx;
    }
    // the potential pair: int W u^2 r dr against int w f^2 dx
    WeightSpec wr = w;
    {
        std::vector<Segment> segs = w.segments();
        for (auto& s : segs)
            for (auto& t : s.terms) t.a += 1.0;
        wr = WeightSpec(std::move(segs));
    }
    const Quad ml = weighted_p_mass(u, 2.0, wr);
    Quad mr;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double af, bf, aw, bw;
        f.cell_line(i, af, bf);
        ws.cell_line(i, aw, bw);
        mr += integrate_adaptive(
            [&](double x) {
                const double fv = af + bf * x;
                return (aw + bw * x) * fv * fv;
            },
            xs[i], xs[i + 1], 1e-12);
    }
    // tail beyond the grid: u and f are the same constant there, and
    // int_{x_N}^inf e^{2x} W(e^x) dx = int_{r_N}^inf W r dr exactly
    if (u.values.back() != 0.0) {
        const Quad tail = integrate(wr, u.grid.back(), kInf);
        if (!tail.divergent) mr.value += u.values.back() * u.values.back() * tail.value;
    }
    return {std::move(f), std::move(ws), lhs, rhs, ml.value, mr.value};
}

/// u-tilde = r^{(d-2)/2} u sampled on the nodes at and beyond R (R inserted
/// as a node when it falls strictly inside the grid).
inline GridFunction peel_hardy(const GridFunction& u, int d, double R) {
    if (d < 1) throw std::invalid_argument("dimension must be a positive integer");
    if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
    const double k = 0.5 * double(d - 2);
    std::vector<double> nodes, vals;
    if (R < u.grid.back() && R > u.grid.front() &&
        std::find(u.grid.nodes.begin(), u.grid.nodes.end(), R) == u.grid.nodes.end()) {
        nodes.push_back(R);
        vals.push_back(std::pow(R, k) * u(R));
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u.grid.nodes[i];
        if (r < R) continue;
        nodes.push_back(r);
        vals.push_back(std::pow(r, k) * u.values[i]);
    }
    if (nodes.size() < 2) throw std::invalid_argument("grid has fewer than two nodes beyond R");
    std::sort(nodes.begin(), nodes.end());
    return GridFunction(LogGrid(std::move(nodes)), std::move(vals), Extension::constant_outside);
}

/// Both sides of the truncated peel identity on [R, r_N]:
///   int |u'|^2 r^{d-1} = int |ut'|^2 r + (d-2)^2/4 int |ut|^2 / r^2 * r
///                        + (d-2)/2 (|ut(R)|^2 - |ut(r_N)|^2)
/// with ut = r^{(d-2)/2} u. Every piece is a closed-form power-polynomial
/// integral, so the check is exact to rounding.
struct PeelIdentity {
    double lhs = 0.0;
    double rhs_deriv = 0.0, rhs_mass = 0.0;
    double boundary_R = 0.0, boundary_T = 0.0;
    double rhs() const { return rhs_deriv + rhs_mass + boundary_R - boundary_T; }
};

inline PeelIdentity peel_identity(const GridFunction& u, int d, double R) {
    if (d < 1) throw std::invalid_argument("dimension must be a positive integer");
    const double k = 0.5 * double(d - 2);
    PeelIdentity out;
    const auto& n = u.grid.nodes;
    const double T = n.back();
    if (!(R < T)) throw std::invalid_argument("R must lie below the last node");
    auto poly_int = [](double e, double q0, double q1, double q2, double a, double b) {
        double v = 0.0;
        if (q0 != 0.0) v += q0 * detail::power_int(e, a, b);
        if (q1 != 0.0) v += q1 * detail::power_int(e + 1.0, a, b);
        if (q2 != 0.0) v += q2 * detail::power_int(e + 2.0, a, b);
        return v;
    };
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        const double a = std::max(n[i], R), b = n[i + 1];
        if (!(a < b)) continue;
        double ua, ub;
        u.cell_line(i, ua, ub);  // u = ua + ub r
        const double s = ub;
        out.lhs += s * s * detail::power_int(double(d - 1), a, b);
        // ut' = r^{k-1} (k ua + (k+1) ub r): |ut'|^2 r = r^{d-3}(k ua + (k+1) ub r)^2
        const double c0 = k * ua, c1 = (k + 1.0) * ub;
        out.rhs_deriv += poly_int(double(d - 3), c0 * c0, 2.0 * c0 * c1, c1 * c1, a, b);
        out.rhs_mass +=
            k * k * poly_int(double(d - 3), ua * ua, 2.0 * ua * ub, ub * ub, a, b);
    }
    const double utR = std::pow(R, k) * u(R);
    const double utT = std::pow(T, k) * u.values.back();
    out.boundary_R = k * utR * utR;
    out.boundary_T = k * utT * utT;
    return out;
}

}  // namespace hardylab
