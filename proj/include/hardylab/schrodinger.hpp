#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hardylab/grid.hpp"
#include "hardylab/maximize.hpp"
#include "hardylab/tridiag.hpp"

namespace hardylab {

/// Spherically symmetric potential coupling for -Laplace - Q in dimension d.
struct RadialPotential {
    WeightSpec Q;
    int d = 3;

    RadialPotential(WeightSpec q, int dim) : Q(std::move(q)), d(dim) {
        if (d < 1) throw std::invalid_argument("dimension must be a positive integer");
    }
};

/// Robin constant of the inside/outside splitting: R^{-1}, (ln R)^{-1}, 0
/// for d = 1, 2, >= 3.
inline double birman_robin_constant(int d, double R) {
    if (d == 1) return 1.0 / R;
    if (d == 2) {
        if (!(R > 1.0)) throw std::invalid_argument("d = 2 needs R > 1");
        return 1.0 / std::log(R);
    }
    return 0.0;
}

/// Robin constant of the peeled route: ((ln R)^{-1} - (d-2)/2) R^{d-2}.
inline double improved_robin_constant(int d, double R) {
    if (!(R > 1.0)) throw std::invalid_argument("the peeled route needs R > 1");
    return (1.0 / std::log(R) - 0.5 * double(d - 2)) * std::pow(R, double(d - 2));
}

namespace detail {

inline WeightSpec shifted_weight(const WeightSpec& w, double shift) {
    std::vector<Segment> segs = w.segments();
    for (auto& s : segs)
        for (auto& t : s.terms) t.a += shift;
    return WeightSpec(std::move(segs));
}

// int_lo^hi max(0, q(s) - k/s^2) * s ds on a finite interval, locating the
// sign changes of q s^2 - k by scan plus bisection
inline Quad positive_part_finite(const WeightSpec& q, double k, double lo, double hi) {
    Quad out;
    if (!(lo < hi)) return out;
    auto gap = [&](double s) { return q(s) * s * s - k; };
    auto integrand = [&](double s) { return std::max(0.0, q(s) - k / (s * s)) * s; };
    const int chunks = std::max(8, int(16.0 * std::log10(hi / lo)) + 1);
    const double step = std::log(hi / lo) / chunks;
    double a = lo, ga = gap(lo);
    for (int i = 0; i < chunks; ++i) {
        double b = i + 1 == chunks ? hi : lo * std::exp((i + 1) * step);
        double gb = gap(b);
        if (ga <= 0.0 && gb <= 0.0) {
            // no endpoint support; adaptive still catches a small interior bump
            out += integrate_adaptive(integrand, a, b, 1e-11, 1e-14);
        } else if (ga > 0.0 && gb > 0.0) {
            out += integrate_adaptive(integrand, a, b, 1e-12);
        } else {
            double x0 = a, x1 = b;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (x0 + x1);
                if ((gap(mid) > 0.0) == (ga > 0.0))
                    x0 = mid;
                else
                    x1 = mid;
            }
            const double cross = 0.5 * (x0 + x1);
            if (ga > 0.0)
                out += integrate_adaptive(integrand, a, cross, 1e-12);
            else
                out += integrate_adaptive(integrand, cross, b, 1e-12);
        }
        a = b;
        ga = gb;
    }
    return out;
}

// classification of the positive-part tail on the last (infinite) segment
struct TailClass {
    bool divergent = false;
    bool bounded_support = false;  // positive part vanishes beyond some radius
    double support_end = 0.0;
    // at exact criticality the remainder integrates term by term
    std::vector<Term> exact_terms;
};

inline TailClass classify_positive_tail(const Segment& seg, double k) {
    TailClass out;
    double critical_coef = 0.0;
    for (const auto& t : seg.terms) {
        if (t.c == 0.0) continue;
        if (t.a > -2.0 || (t.a == -2.0 && t.b > 0.0)) {
            out.divergent = true;
            return out;
        }
        if (t.a == -2.0 && t.b == 0.0) critical_coef += t.c;
    }
    const double kk = k - critical_coef;
    if (kk < 0.0) {
        out.divergent = true;
        return out;
    }
    for (const auto& t : seg.terms) {
        if (t.c == 0.0 || (t.a == -2.0 && t.b == 0.0)) continue;
        out.exact_terms.push_back(t);
    }
    if (kk == 0.0) {
        // remaining terms are exactly the positive part; they must integrate
        for (const auto& t : out.exact_terms)
            if (t.a == -2.0 && t.b >= -1.0) {
                out.divergent = true;
                return out;
            }
        return out;
    }
    out.bounded_support = true;
    return out;
}

inline Quad positive_part_tail(const WeightSpec& q, double k, double r) {
    Quad out;
    const auto& segs = q.segments();
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
        const double a = std::max(segs[i].lo, r);
        const double b = segs[i].hi;
        if (a < b) out += positive_part_finite(q, k, a, b);
    }
    const Segment& last = segs.back();
    const double a = std::max(last.lo, r);
    const TailClass tc = classify_positive_tail(last, k);
    if (tc.divergent) return Quad::diverged();
    if (tc.bounded_support) {
        // find where q s^2 - k goes and stays nonpositive, then integrate
        auto gap = [&](double s) { return q(s) * s * s - k; };
        double s_hi = std::max(a, 1.0);
        int consecutive = 0;
        for (int it = 0; it < 500 && consecutive < 3; ++it) {
            s_hi *= 2.0;
            consecutive = gap(s_hi) <= 0.0 ? consecutive + 1 : 0;
        }
        if (a < s_hi) out += positive_part_finite(q, k, a, s_hi);
        return out;
    }
    // exact criticality: integrate the leftover terms in closed form
    for (auto t : tc.exact_terms) {
        t.a += 1.0;  // the extra factor of s
        out += detail::term_integral(t, a, kInf);
        if (out.divergent) return Quad::diverged();
    }
    return out;
}

}  // namespace detail

/// Theorem-7.1 integral condition as a ratio: value <= 1 means the condition
/// holds at r. For d != 2 the ratio is
/// [int_r^inf Q_+ s^{1-|d-2|} ds] / [|d-2| / (4 r^{|d-2|})];
/// for d = 2 it is [int_r^inf Q_+ s ds] * 4 ln r, requiring r > 1.
inline double birman_margin(const RadialPotential& pot, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
    if (pot.d == 2) {
        if (!(r > 1.0)) throw std::invalid_argument("d = 2 margin needs r > 1");
        const Quad num = integrate(detail::shifted_weight(pot.Q, 1.0), r, kInf);
        if (num.divergent) return kInf;
        return num.value * 4.0 * std::log(r);
    }
    const double dd = std::fabs(double(pot.d - 2));
    const Quad num = integrate(detail::shifted_weight(pot.Q, 1.0 - dd), r, kInf);
    if (num.divergent) return kInf;
    return num.value / (dd / (4.0 * std::pow(r, dd)));
}

/// Theorem-7.2 condition: [int_r^inf (Q - (d-2)^2/(4 s^2))_+ s ds] * 4 ln r.
inline double improved_margin(const RadialPotential& pot, double r) {
    if (!(r > 1.0)) throw std::invalid_argument("improved margin needs r > 1");
    const double k = 0.25 * double(pot.d - 2) * double(pot.d - 2);
    const Quad num = detail::positive_part_tail(pot.Q, k, r);
    if (num.divergent) return kInf;
    return num.value * 4.0 * std::log(r);
}

namespace detail {

// limit of the margin as r -> inf: 0, a finite constant, or +inf
inline double birman_margin_limit(const RadialPotential& pot) {
    const Segment& last = pot.Q.segments().back();
    double limit = 0.0;
    for (const auto& t : last.terms) {
        if (t.c == 0.0) continue;
        if (t.a > -2.0 || (t.a == -2.0 && t.b > 0.0)) return kInf;
        if (t.a == -2.0 && t.b == 0.0) {
            if (pot.d == 2) return kInf;  // int s^{-1} ds diverges
            const double dd = std::fabs(double(pot.d - 2));
            limit += 4.0 * t.c / (dd * dd);
        }
        if (pot.d == 2 && t.a == -2.0) {
            if (t.b >= -1.0) return kInf;
            if (t.b > -2.0) return kInf;            // margin ~ (ln r)^{b+2} grows
            if (t.b == -2.0) limit += 4.0 * t.c;    // the log-critical weight
        }
    }
    return limit;
}

inline double improved_margin_limit(const RadialPotential& pot) {
    const double k = 0.25 * double(pot.d - 2) * double(pot.d - 2);
    const TailClass tc = classify_positive_tail(pot.Q.segments().back(), k);
    if (tc.divergent) return kInf;
    if (tc.bounded_support) return 0.0;
    double limit = 0.0;
    for (const auto& t : tc.exact_terms) {
        if (t.a < -2.0) continue;  // decays against any log
        if (t.b > -2.0) return kInf;
        if (t.b == -2.0) limit += 4.0 * t.c;
    }
    return limit;
}

}  // namespace detail

/// Discrete outside form int_R^T (|u'|^2 - Q|u|^2) r^{d-1} dr + c_R |u(R)|^2
/// over piecewise-linear u with u(T) = 0, as its minimal generalized
/// eigenvalue against the r^{d-1}-weighted mass form.
inline double outside_form_nonnegativity(const RadialPotential& pot, double R,
                                         const LogGrid& grid, double c_R) {
    if (grid.front() != R) throw std::invalid_argument("grid must start at R");
    const std::size_t n = grid.size();
    const WeightSpec rpow = WeightSpec::power(1.0, double(pot.d - 1));
    const WeightSpec qshift = detail::shifted_weight(pot.Q, double(pot.d - 1));
    SymTridiag A, B;
    const std::size_t m = n - 1;  // free nodes 0..n-2, Dirichlet at T
    A.diag.assign(m, 0.0);
    A.off.assign(m - 1, 0.0);
    B.diag.assign(m, 0.0);
    B.off.assign(m - 1, 0.0);
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const double a = grid.nodes[c], b = grid.nodes[c + 1];
        const double h = b - a, h2 = h * h;
        const Quad iv = integrate(rpow, a, b);
        const Quad mll = integrate_times_poly(rpow, a, b, b * b, -2.0 * b, 1.0);
        const Quad mlr = integrate_times_poly(rpow, a, b, -a * b, a + b, -1.0);
        const Quad mrr = integrate_times_poly(rpow, a, b, a * a, -2.0 * a, 1.0);
        const Quad qll = integrate_times_poly(qshift, a, b, b * b, -2.0 * b, 1.0);
        const Quad qlr = integrate_times_poly(qshift, a, b, -a * b, a + b, -1.0);
        const Quad qrr = integrate_times_poly(qshift, a, b, a * a, -2.0 * a, 1.0);
        if (qll.divergent || qlr.divergent || qrr.divergent)
            throw std::invalid_argument("Q r^{d-1} is not integrable on a cell");
        const double k = iv.value / h2;
        A.diag[c] += k - qll.value / h2;
        B.diag[c] += mll.value / h2;
        if (c + 1 < m) {
            A.diag[c + 1] += k - qrr.value / h2;
            A.off[c] += -k - qlr.value / h2;
            B.diag[c + 1] += mrr.value / h2;
            B.off[c] += mlr.value / h2;
        }
    }
    A.diag[0] += c_R;
    return smallest_generalized_eig(A, B);
}

/// The same quadratic form evaluated on one piecewise-linear u (exact closed
/// forms per cell); used to chase the Theorem 7.2 proof chain numerically.
inline double outside_form_value(const RadialPotential& pot, double R, double c_R,
                                 const GridFunction& u) {
    const auto& nodes = u.grid.nodes;
    const WeightSpec qshift = detail::shifted_weight(pot.Q, double(pot.d - 1));
    double acc = c_R * u(R) * u(R);
    for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
        const double a = std::max(nodes[c], R), b = nodes[c + 1];
        if (!(a < b)) continue;
        double ua, ub;
        u.cell_line(c, ua, ub);
        acc += ub * ub * detail::power_int(double(pot.d - 1), a, b);
        const Quad qm = integrate_times_poly(qshift, a, b, ua * ua, 2.0 * ua * ub, ub * ub);
        if (qm.divergent) throw std::invalid_argument("Q r^{d-1} is not integrable on a cell");
        acc -= qm.value;
    }
    return acc;
}

enum class CertStatus { finite_certified, undecided };
enum class Criterion { birman, improved };

/// Outcome of the finiteness certification: the first criterion whose margin
/// stays <= 1 from R on (samples plus the analytic tail limit), the Robin
/// constant of the corresponding splitting, the sampled margin profile, and
/// the minimal eigenvalue of the discrete outside form.
struct Certificate {
    CertStatus status = CertStatus::undecided;
    Criterion criterion = Criterion::birman;
    double R = 0.0;
    double c_R = 0.0;
    GridFunction margin;
    double outside_form_min_eig = 0.0;
};

struct CertifyOptions {
    double horizon = 1e6;
    int samples_per_decade = 64;
    double tol = 1e-9;
    double truncation_decades = 3.0;
    int form_nodes_per_decade = 32;
};

inline Certificate certify_finiteness(const RadialPotential& pot, CertifyOptions opts = {}) {
    Certificate best;
    for (Criterion crit : {Criterion::birman, Criterion::improved}) {
        const bool needs_above_one = crit == Criterion::improved || pot.d == 2;
        const double r0 = needs_above_one ? std::pow(10.0, 1.0 / opts.samples_per_decade) : 1.0;
        std::vector<double> rs = log_candidates(pot.Q.breakpoints(), r0, opts.horizon,
                                                opts.samples_per_decade);
        std::vector<double> margins(rs.size());
        std::size_t last_fail = rs.size();  // sentinel: none
        for (std::size_t i = rs.size(); i-- > 0;) {
            margins[i] = crit == Criterion::birman ? birman_margin(pot, rs[i])
                                                   : improved_margin(pot, rs[i]);
            if (margins[i] > 1.0 + opts.tol && last_fail == rs.size()) last_fail = i;
        }
        const double limit = crit == Criterion::birman ? detail::birman_margin_limit(pot)
                                                       : detail::improved_margin_limit(pot);
        if (limit > 1.0 + opts.tol) continue;
        if (last_fail == rs.size() - 1) continue;  // margin still failing at the horizon
        const std::size_t iR = last_fail == rs.size() ? 0 : last_fail + 1;
        const double R = rs[iR];
        const double c_R = crit == Criterion::birman ? birman_robin_constant(pot.d, R)
                                                     : improved_robin_constant(pot.d, R);
        std::vector<double> mnodes(rs.begin() + iR, rs.end());
        std::vector<double> mvals(margins.begin() + iR, margins.end());
        Certificate cert;
        cert.criterion = crit;
        cert.R = R;
        cert.c_R = c_R;
        cert.margin = GridFunction(LogGrid(std::move(mnodes)), std::move(mvals));
        const double T = R * std::pow(10.0, opts.truncation_decades);
        const std::size_t fn =
            std::max<std::size_t>(16, std::size_t(opts.truncation_decades *
                                                  opts.form_nodes_per_decade));
        cert.outside_form_min_eig =
            outside_form_nonnegativity(pot, R, LogGrid::geometric(R, T, fn), c_R);
        if (cert.outside_form_min_eig >= -1e-8) {
            cert.status = CertStatus::finite_certified;
            return cert;
        }
        best = cert;  // margins passed but the discrete form dipped: keep as context
    }
    if (best.margin.size() == 0) {
        // undecided: report the birman margins from r = 1 for context
        const double r0 = pot.d == 2 ? std::pow(10.0, 1.0 / opts.samples_per_decade) : 1.0;
        std::vector<double> rs =
            log_candidates(pot.Q.breakpoints(), r0, opts.horizon, opts.samples_per_decade);
        std::vector<double> margins(rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) margins[i] = birman_margin(pot, rs[i]);
        for (double& mv : margins)
            if (std::isinf(mv)) mv = 1e308;  // carrier values must stay finite
        best.margin = GridFunction(LogGrid(std::move(rs)), std::move(margins));
        best.R = 0.0;
    }
    best.status = CertStatus::undecided;
    return best;
}

/// Zero-energy oscillation count of the reduced half-line problem in the
/// sector ell: the number of sign changes in (0, L), plus the continuous
/// Pruefer winding theta(L)/pi it is the floor of.
struct OscillationCount {
    int count = 0;
    double phase_turns = 0.0;
};

/// Angular multiplicity of the sector (2l+1 in three dimensions).
inline long multiplicity(int d, int ell) {
    if (d == 1) return 1;
    if (d == 2) return ell == 0 ? 1 : 2;
    if (ell == 0) return 1;
    // (2l + d - 2)/(d - 2) * C(l + d - 3, l)
    long num = 2 * ell + d - 2;
    long binom = 1;
    for (int j = 1; j <= d - 3; ++j) {
        binom *= ell + j;
        binom /= j;
    }
    return num * binom / (d - 2);
}

inline OscillationCount count_negative_eigenvalues_radial(const RadialPotential& pot, int ell,
                                                          double L, std::size_t steps = 20000) {
    if (ell < 0) throw std::invalid_argument("angular momentum must be >= 0");
    if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
    const double K = double(ell) * double(ell + pot.d - 2) +
                     0.25 * double(pot.d - 1) * double(pot.d - 3);
    const double nu0 = 0.5 * std::sqrt(1.0 + 4.0 * K);
    // start below the positive-radius support of Q; when the support reaches
    // the origin the guard loop below shrinks r0 until Q is negligible there
    double first_support = kInf;
    for (const auto& s : pot.Q.segments())
        for (const auto& t : s.terms)
            if (t.c != 0.0 && s.lo > 0.0) first_support = std::min(first_support, s.lo);
    double r0 = 1e-3 * std::min(1.0, std::isinf(first_support) ? 1.0 : first_support);
    r0 = std::min(r0, 1e-3 * L);
    for (int guard = 0; guard < 80; ++guard) {
        if (r0 * r0 * pot.Q(r0) <= 1e-10 * (K + 0.25 + 1.0) || r0 <= 1e-250) break;
        r0 *= 0.1;
    }
    const double x0 = std::log(r0), x1 = std::log(L);
    // S(x) = e^{2x} Q(e^x) - K - 1/4; w'' + S w = 0 in x = ln r
    auto S = [&](double x) {
        const double r = std::exp(x);
        return r * r * pot.Q(r) - K - 0.25;
    };
    // chunk boundaries: breakpoints of Q plus unit slabs
    std::vector<double> bounds{x0};
    for (double b : pot.Q.breakpoints()) {
        const double xb = std::log(b);
        if (xb > x0 && xb < x1) bounds.push_back(xb);
    }
    bounds.push_back(x1);
    std::sort(bounds.begin(), bounds.end());
    std::vector<double> fine{bounds.front()};
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        const double len = bounds[i + 1] - bounds[i];
        const int slabs = std::max(1, int(len));
        for (int j = 1; j <= slabs; ++j) fine.push_back(bounds[i] + len * j / slabs);
    }

    const double tol_per_x = 1e-8 / std::log(10.0);
    double gamma = 0.0;
    double theta = 0.0;
    bool started = false;
    for (std::size_t c = 0; c + 1 < fine.size(); ++c) {
        const double a = fine[c], b = fine[c + 1];
        const double Smid = S(0.5 * (a + b));
        const double gnew = Smid > 0.25 ? std::sqrt(Smid) : 0.5;
        if (!started) {
            gamma = gnew;
            theta = std::atan2(gamma, nu0);  // tan(theta) = gamma * w / w'
            started = true;
        } else if (gnew != gamma) {
            const double k = std::floor(theta / M_PI);
            const double phi = theta - k * M_PI;
            theta = k * M_PI + std::atan2(gnew * std::sin(phi), gamma * std::cos(phi));
            gamma = gnew;
        }
        auto rhs = [&](double x, double th) {
            const double sn = std::sin(th), cs = std::cos(th);
            return gamma * cs * cs + (S(x) / gamma) * sn * sn;
        };
        auto rk4 = [&](double x, double th, double h) {
            const double k1 = rhs(x, th);
            const double k2 = rhs(x + 0.5 * h, th + 0.5 * h * k1);
            const double k3 = rhs(x + 0.5 * h, th + 0.5 * h * k2);
            const double k4 = rhs(x + h, th + h * k3);
            return th + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        };
        const std::size_t base =
            std::max<std::size_t>(8, std::size_t(double(steps) * (b - a) / (x1 - x0)) + 1);
        double h = (b - a) / double(base);
        double x = a;
        while (b - x > 1e-14 * std::max(std::fabs(b), 1.0)) {
            const double hh = std::min(h, b - x);
            const double full = rk4(x, theta, hh);
            const double half = rk4(x + 0.5 * hh, rk4(x, theta, 0.5 * hh), 0.5 * hh);
            const double err = std::fabs(full - half) / 15.0;
            const double tol = tol_per_x * hh;
            if (err > tol && hh > 1e-12 * (b - a)) {
                h = 0.5 * hh;
                continue;
            }
            theta = half + (half - full) / 15.0;
            x += hh;
            if (err < 0.01 * tol) h = std::min(2.0 * hh, b - a);
        }
    }
    OscillationCount out;
    out.phase_turns = theta / M_PI;
    out.count = int(std::floor(out.phase_turns));
    return out;
}

}  // namespace hardylab
