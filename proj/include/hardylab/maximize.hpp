#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hardylab/quad.hpp"

namespace hardylab {

struct SupResult {
    double value = 0.0;
    double argmax = 0.0;
};

/// Candidate abscissae for a sup over s: a log grid spanning the breakpoints
/// with extra margin decades, plus the breakpoints themselves.
inline std::vector<double> log_candidates(const std::vector<double>& breakpoints, double lo,
                                          double hi, int per_decade) {
    std::vector<double> cs;
    const double decades = std::log10(hi / lo);
    const std::size_t n = std::max<std::size_t>(2, std::size_t(decades * per_decade) + 1);
    const double step = std::log(hi / lo) / double(n - 1);
    cs.reserve(n + breakpoints.size());
    for (std::size_t i = 0; i < n; ++i) cs.push_back(lo * std::exp(double(i) * step));
    for (double b : breakpoints)
        if (b >= lo && b <= hi) cs.push_back(b);
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    return cs;
}

/// Coarse scan over the candidates followed by golden-section refinement (on
/// log scale) inside the bracket around the discrete argmax. The objective is
/// piecewise-smooth with kinks only at candidate points, so the local search
/// is justified; the global scan guards against multimodality.
template <class F>
SupResult maximize_over(F&& f, const std::vector<double>& candidates) {
    SupResult best{-kInf, candidates.empty() ? 0.0 : candidates.front()};
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double v = f(candidates[i]);
        if (v > best.value) {
            best = {v, candidates[i]};
            best_i = i;
        }
    }
    if (std::isinf(best.value)) return best;
    const double lo = candidates[best_i == 0 ? 0 : best_i - 1];
    const double hi = candidates[std::min(best_i + 1, candidates.size() - 1)];
    if (!(lo < hi)) return best;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(lo), b = std::log(hi);
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int it = 0; it < 120 && b - a > 1e-14; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(std::exp(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(std::exp(x1));
        }
    }
    const double xm = std::exp(0.5 * (a + b));
    const double fm = f(xm);
    if (fm > best.value) best = {fm, xm};
    if (f1 > best.value) best = {f1, std::exp(x1)};
    if (f2 > best.value) best = {f2, std::exp(x2)};
    return best;
}

}  // namespace hardylab
