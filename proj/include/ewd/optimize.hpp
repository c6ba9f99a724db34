#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ewd {

struct BoxAscentOptions {
    int max_iter = 200;
    double grad_tol = 1e-8;  // projected-gradient infinity norm
    int memory = 6;          // limited-memory pair count
};

struct BoxAscentResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
};

// Maximizes f over the box [lower, upper] by limited-memory quasi-Newton
// ascent with gradient projection and backtracking. fg must return the value
// and fill grad. Deterministic for a fixed starting point.
BoxAscentResult maximize_box(
    const std::function<double(std::span<const double>, std::span<double>)>& fg,
    std::span<const double> lower, std::span<const double> upper, std::span<const double> x0,
    const BoxAscentOptions& options = {});

}  // namespace ewd
