#pragma once

#include <vector>

#include "ewd/expectation.hpp"
#include "ewd/region.hpp"

namespace ewd {

struct RoundingConfig {
    double delta_r = 0.1;             // merging threshold, typically > ForLion delta
    std::vector<double> grid_levels;  // L_1..L_k, one per continuous factor
    long n = 0;                       // total experimental units
};

struct RoundingReport {
    ExactDesign design;
    // |F| of the rounded design stayed positive (re-checked after the grid
    // snap; reported rather than enforced)
    bool info_nonsingular = true;
    // (|F_exact| / |F_input|)^(1/p) with the exact design read as weights n_i/n
    double relative_efficiency = 0.0;
};

// Greedy remainder allocation: each leftover unit goes to the eligible point
// (n w_i > n_i) whose increment raises |F| the most; ties to the lowest
// index. Returns the augmented counts.
std::vector<long> greedy_unit_assign(const ExpectationContext& ctx,
                                     const std::vector<DesignPoint>& points,
                                     const std::vector<double>& weights, std::vector<long> counts,
                                     long n);

// Weighted-centroid merging, grid snapping, floor allocation plus greedy
// remainders, zero-count deletion.
RoundingReport round_design(const ExpectationContext& ctx, const ApproximateDesign& xi,
                            const RoundingConfig& cfg);

}  // namespace ewd
