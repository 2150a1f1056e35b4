#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hardylab/constants.hpp"
#include "hardylab/grid.hpp"
#include "hardylab/tridiag.hpp"

namespace hardylab {

struct EstimatorConfig {
    double eps = 1e-6;
    double L = 1e6;
    std::size_t n = 4000;
    double p = 2.0;
    int max_iter = 400;
    double tol = 1e-10;

    void validate() const {
        if (!(eps > 0.0) || !(eps < L)) throw std::invalid_argument("need 0 < eps < L");
        if (n < 16) throw std::invalid_argument("need at least 16 nodes");
        if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
        if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    }
};

struct SandwichResult {
    double lower = 0.0;     // Lemma 4.2 converse bound
    double estimate = 0.0;  // variational estimate of the sharp C
    double upper = 0.0;     // min of the two Theorem 1.2 bounds
    bool converged = false;
    int iterations = 0;
};

namespace detail {

// per-cell integrals of V and the W-weighted hat products on a grid
struct Forms {
    SymTridiag stiffness;  // int V phi_i' phi_j' over the free nodes 1..n-1
    SymTridiag mass;       // int W phi_i phi_j
};

inline Forms assemble_forms(const WeightSpec& v, const WeightSpec& w, const LogGrid& g) {
    const std::size_t n = g.size();
    Forms f;
    f.stiffness.diag.assign(n - 1, 0.0);
    f.stiffness.off.assign(n - 2, 0.0);
    f.mass.diag.assign(n - 1, 0.0);
    f.mass.off.assign(n - 2, 0.0);
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const double a = g.nodes[c], b = g.nodes[c + 1];
        const double h = b - a;
        const Quad iv = integrate(v, a, b);
        if (iv.divergent) throw std::invalid_argument("V is not integrable on a cell");
        const double k = iv.value / (h * h);
        if (k == 0.0) throw std::invalid_argument("singular stiffness: V vanishes on a cell");
        // hats: left = (b-r)/h, right = (r-a)/h
        const Quad mll = integrate_times_poly(w, a, b, b * b, -2.0 * b, 1.0);
        const Quad mlr = integrate_times_poly(w, a, b, -a * b, a + b, -1.0);
        const Quad mrr = integrate_times_poly(w, a, b, a * a, -2.0 * a, 1.0);
        if (mll.divergent || mlr.divergent || mrr.divergent)
            throw std::invalid_argument("W is not integrable on a cell");
        const double h2 = h * h;
        // free dofs are nodes 1..n-1; node 0 carries the Dirichlet condition
        if (c >= 1) {
            f.stiffness.diag[c - 1] += k;
            f.stiffness.off[c - 1] -= k;
            f.mass.diag[c - 1] += mll.value / h2;
            f.mass.off[c - 1] += mlr.value / h2;
        }
        f.stiffness.diag[c] += k;
        f.mass.diag[c] += mrr.value / h2;
    }
    return f;
}

// deterministic start profile shaped like phi^{1/2}, vanishing at eps
inline std::vector<double> phi_profile(const WeightSpec& v, const LogGrid& g, double p) {
    const WeightSpec vinv = power_of_inverse(v, p);
    std::vector<double> x(g.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const Quad piece = integrate(vinv, g.nodes[i], g.nodes[i + 1]);
        acc += piece.divergent ? 1.0 : piece.value;
        x[i] = std::sqrt(acc);
    }
    return x;
}

}  // namespace detail

/// Largest Rayleigh quotient int W u^2 / int V u'^2 over piecewise-linear u
/// on the log grid, u(eps) = 0, free at L; inverse iteration on the
/// tridiagonal pencil. Convergence is declared on the quotient.
inline double best_constant_p2(const WeightSpec& v, const WeightSpec& w, EstimatorConfig cfg,
                               bool* converged = nullptr, int* iterations = nullptr) {
    cfg.validate();
    if (w.is_zero()) {
        if (converged) *converged = true;
        if (iterations) *iterations = 0;
        return 0.0;
    }
    const LogGrid g = LogGrid::geometric(cfg.eps, cfg.L, cfg.n);
    const detail::Forms f = detail::assemble_forms(v, w, g);
    std::vector<double> x = detail::phi_profile(v, g, 2.0);
    auto apply = [](const SymTridiag& t, const std::vector<double>& y) {
        const std::size_t n = t.size();
        std::vector<double> r(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] += t.diag[i] * y[i];
            if (i > 0) r[i] += t.off[i - 1] * y[i - 1];
            if (i + 1 < n) r[i] += t.off[i] * y[i + 1];
        }
        return r;
    };
    double q_prev = 0.0;
    bool ok = false;
    int it = 0;
    for (; it < cfg.max_iter; ++it) {
        const std::vector<double> y = apply(f.mass, x);
        std::vector<double> z = solve(f.stiffness, y);
        const std::vector<double> mz = apply(f.mass, z);
        const std::vector<double> kz = apply(f.stiffness, z);
        double num = 0.0, den = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            num += z[i] * mz[i];
            den += z[i] * kz[i];
            norm += z[i] * z[i];
        }
        const double q = den > 0.0 ? num / den : 0.0;
        const double scale = 1.0 / std::sqrt(norm);
        for (double& zi : z) zi *= scale;
        x.swap(z);
        if (it > 0 && std::fabs(q - q_prev) <= cfg.tol * std::fabs(q)) {
            q_prev = q;
            ok = true;
            break;
        }
        q_prev = q;
    }
    if (converged) *converged = ok;
    if (iterations) *iterations = it + 1;
    return q_prev;
}

/// Fixed-point ascent of Q(u) = int W|u|^p / int V|u'|^p: normalize the
/// denominator, take a preconditioned gradient step (tridiagonal energy
/// metric), backtrack until Q increases. Monotone in Q by construction.
inline double best_constant_general_p(const WeightSpec& v, const WeightSpec& w,
                                      EstimatorConfig cfg, bool* converged = nullptr,
                                      int* iterations = nullptr,
                                      std::vector<double>* quotient_trace = nullptr) {
    cfg.validate();
    const double p = cfg.p;
    if (w.is_zero()) {
        if (converged) *converged = true;
        if (iterations) *iterations = 0;
        return 0.0;
    }
    const LogGrid g = LogGrid::geometric(cfg.eps, cfg.L, cfg.n);
    const std::size_t n = g.size();
    const std::size_t m = n - 1;  // free dofs: nodes 1..n-1

    // per-cell V integrals and fixed Gauss-Legendre data for the W side
    static const double gl_x[8] = {0.0950125098376374, 0.2816035507792589,
                                   0.4580167776572274, 0.6178762444026438,
                                   0.7554044083550030, 0.8656312023878318,
                                   0.9445750230732326, 0.9894009349916499};
    static const double gl_w[8] = {0.1894506104550685, 0.1826034150449236,
                                   0.1691565193950025, 0.1495959888165767,
                                   0.1246289712555339, 0.0951585116824928,
                                   0.0622535239386479, 0.0271524594117541};
    std::vector<double> iv(n - 1);
    std::vector<double> qr, qw;  // quadrature radii and W(r)*weight
    qr.reserve(16 * (n - 1));
    qw.reserve(16 * (n - 1));
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const Quad q = integrate(v, g.nodes[c], g.nodes[c + 1]);
        if (q.divergent) throw std::invalid_argument("V is not integrable on a cell");
        if (q.value == 0.0) throw std::invalid_argument("singular stiffness: V vanishes on a cell");
        iv[c] = q.value;
        const double mid = 0.5 * (g.nodes[c] + g.nodes[c + 1]);
        const double hl = 0.5 * (g.nodes[c + 1] - g.nodes[c]);
        for (int k = 0; k < 8; ++k) {
            const double r1 = mid - hl * gl_x[k], r2 = mid + hl * gl_x[k];
            qr.push_back(r1);
            qw.push_back(w(r1) * gl_w[k] * hl);
            qr.push_back(r2);
            qw.push_back(w(r2) * gl_w[k] * hl);
        }
    }
    // gradient metric: lagged-diffusivity stiffness, V-weighted and scaled by
    // the current |slope|^{p-2} per cell (regularized so flat cells stay SPD)
    auto metric = [&](const std::vector<double>& x) {
        SymTridiag prec;
        prec.diag.assign(m, 0.0);
        prec.off.assign(m - 1, 0.0);
        double smax = 0.0;
        std::vector<double> slopes(n - 1);
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double u0 = c == 0 ? 0.0 : x[c - 1];
            const double u1 = x[c];
            slopes[c] = (u1 - u0) / (g.nodes[c + 1] - g.nodes[c]);
            smax = std::max(smax, std::fabs(slopes[c]));
        }
        const double delta = std::max(1e-8 * smax, 1e-300);
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double h = g.nodes[c + 1] - g.nodes[c];
            const double wgt = std::pow(slopes[c] * slopes[c] + delta * delta, 0.5 * (p - 2.0));
            const double k = wgt * iv[c] / (h * h);
            if (c >= 1) {
                prec.diag[c - 1] += k;
                prec.off[c - 1] -= k;
            }
            prec.diag[c] += k;
        }
        return prec;
    };

    auto at = [&](const std::vector<double>& x, std::size_t node) {
        return node == 0 ? 0.0 : x[node - 1];
    };
    auto denom = [&](const std::vector<double>& x) {
        double d = 0.0;
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double s = (at(x, c + 1) - at(x, c)) / (g.nodes[c + 1] - g.nodes[c]);
            d += std::pow(std::fabs(s), p) * iv[c];
        }
        return d;
    };
    auto numer = [&](const std::vector<double>& x) {
        double acc = 0.0;
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double x0 = g.nodes[c], x1 = g.nodes[c + 1];
            const double u0 = at(x, c), u1 = at(x, c + 1);
            const double b = (u1 - u0) / (x1 - x0);
            const double a = u0 - b * x0;
            for (std::size_t k = 16 * c; k < 16 * (c + 1); ++k)
                acc += qw[k] * std::pow(std::fabs(a + b * qr[k]), p);
        }
        return acc;
    };
    auto gradients = [&](const std::vector<double>& x, std::vector<double>& gN,
                         std::vector<double>& gD) {
        gN.assign(m, 0.0);
        gD.assign(m, 0.0);
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double x0 = g.nodes[c], x1 = g.nodes[c + 1];
            const double h = x1 - x0;
            const double u0 = at(x, c), u1 = at(x, c + 1);
            const double s = (u1 - u0) / h;
            const double dD = p * std::pow(std::fabs(s), p - 1.0) * (s >= 0.0 ? 1.0 : -1.0) *
                              iv[c] / h;
            if (c >= 1) gD[c - 1] -= dD;
            gD[c] += dD;
            const double b = s;
            const double a = u0 - b * x0;
            for (std::size_t k = 16 * c; k < 16 * (c + 1); ++k) {
                const double uval = a + b * qr[k];
                const double d = qw[k] * p * std::pow(std::fabs(uval), p - 1.0) *
                                 (uval >= 0.0 ? 1.0 : -1.0);
                const double t = (qr[k] - x0) / h;
                if (c >= 1) gN[c - 1] += d * (1.0 - t);
                gN[c] += d * t;
            }
        }
    };

    std::vector<double> x = detail::phi_profile(v, g, p);
    {
        const double d0 = denom(x);
        const double sc = std::pow(d0, -1.0 / p);
        for (double& xi : x) xi *= sc;
    }
    double q = numer(x);  // denominator normalized to 1
    if (quotient_trace) quotient_trace->push_back(q);
    bool ok = false;
    int it = 0;
    double step = 1.0;
    std::vector<double> gN, gD;
    for (; it < cfg.max_iter; ++it) {
        gradients(x, gN, gD);
        std::vector<double> raw(m);
        for (std::size_t i = 0; i < m; ++i) raw[i] = gN[i] - q * gD[i];
        std::vector<double> dir = solve(metric(x), raw);
        double q_new = q;
        std::vector<double> xn;
        bool improved = false;
        for (int bt = 0; bt < 60; ++bt) {
            xn = x;
            for (std::size_t i = 0; i < m; ++i) xn[i] += step * dir[i];
            const double dn = denom(xn);
            if (dn > 0.0) {
                const double sc = std::pow(dn, -1.0 / p);
                for (double& xi : xn) xi *= sc;
                q_new = numer(xn);
                if (q_new > q) {
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!improved) {
            ok = true;  // no ascent direction improves: stationary at tol scale
            break;
        }
        x.swap(xn);
        const double gain = q_new - q;
        q = q_new;
        if (quotient_trace) quotient_trace->push_back(q);
        step *= 2.0;
        if (gain <= cfg.tol * q) {
            ok = true;
            ++it;
            break;
        }
    }
    if (converged) *converged = ok;
    if (iterations) *iterations = it;
    return q;
}

/// Variational estimate sandwiched between the Lemma 4.2 lower bound and the
/// minimum of the two weighted upper bounds.
inline SandwichResult sandwich(const WeightSpec& v, const WeightSpec& w, double p,
                               EstimatorConfig cfg, SupSearchOptions opts = {}) {
    cfg.p = p;
    cfg.validate();
    SandwichResult out;
    out.lower = converse_lower_bound(v, w, p, opts);
    const ConstantResult bo = constant(v, w, p, {Kind::overline, Anchor::origin, Interval::full}, opts);
    const ConstantResult bu = constant(v, w, p, {Kind::underline, Anchor::origin, Interval::full}, opts);
    out.upper = std::min(overline_prefactor(p) * bo.value, underline_prefactor(p) * bu.value);
    if (bo.divergent && bu.divergent) out.upper = kInf;
    if (p == 2.0)
        out.estimate = best_constant_p2(v, w, cfg, &out.converged, &out.iterations);
    else
        out.estimate = best_constant_general_p(v, w, cfg, &out.converged, &out.iterations);
    return out;
}

}  // namespace hardylab
