#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hardylab/grid.hpp"

namespace hardylab {

/// Piecewise-constant function on consecutive cells (edges[i], edges[i+1]],
/// zero outside. The rearrangement machinery works on this carrier because
/// equimeasurability is exact for step functions.
struct StepFunction {
    std::vector<double> edges;   // size m+1, strictly increasing, edges[0] >= 0
    std::vector<double> values;  // size m

    StepFunction() = default;
    StepFunction(std::vector<double> e, std::vector<double> v)
        : edges(std::move(e)), values(std::move(v)) {
        if (edges.size() < 2 || values.size() + 1 != edges.size())
            throw std::invalid_argument("step function needs m+1 edges for m cells");
        if (!(edges.front() >= 0.0)) throw std::invalid_argument("edges must be >= 0");
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            if (!(edges[i] < edges[i + 1]))
                throw std::invalid_argument("edges must be strictly increasing");
    }

    std::size_t cells() const { return values.size(); }

    double operator()(double s) const {
        if (!(s > edges.front()) || s > edges.back()) return 0.0;
        const auto it = std::lower_bound(edges.begin(), edges.end(), s);
        std::size_t i = std::size_t(it - edges.begin());
        return values[i == 0 ? 0 : i - 1];
    }

    bool nonincreasing() const {
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            if (values[i] < values[i + 1] - 0.0) return false;
        return true;
    }

    bool nonnegative() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
    }

    /// int_0^s of the step function (exact, piecewise linear in s).
    double prefix_integral(double s) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (s <= edges[i]) break;
            acc += values[i] * (std::min(s, edges[i + 1]) - edges[i]);
        }
        return acc;
    }

    double total_integral() const { return prefix_integral(edges.back()); }
};

/// The piecewise-constant shadow of |f|: cell value is the average of the
/// endpoint magnitudes (the midpoint value of the linear interpolant of |f|).
inline StepFunction step_shadow(const GridFunction& f) {
    std::vector<double> vals(f.size() - 1);
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        vals[i] = 0.5 * (std::fabs(f.values[i]) + std::fabs(f.values[i + 1]));
    return StepFunction(f.grid.nodes, std::move(vals));
}

/// Cells of the shadow sorted by descending value and laid out from the
/// origin with their lengths kept; nonincreasing and equimeasurable with |f|.
inline StepFunction decreasing_rearrangement(const GridFunction& f) {
    const StepFunction sh = step_shadow(f);
    std::vector<std::size_t> order(sh.cells());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sh.values[a] > sh.values[b]; });
    std::vector<double> edges{0.0}, vals;
    edges.reserve(sh.cells() + 1);
    vals.reserve(sh.cells());
    double pos = 0.0;
    for (std::size_t idx : order) {
        pos += sh.edges[idx + 1] - sh.edges[idx];
        edges.push_back(pos);
        vals.push_back(sh.values[idx]);
    }
    return StepFunction(std::move(edges), std::move(vals));
}

}  // namespace hardylab
