#pragma once

#include <cstdint>
#include <vector>

#include "ewd/expectation.hpp"
#include "ewd/matrix.hpp"
#include "ewd/region.hpp"

namespace ewd {

struct ForLionConfig {
    double delta = 1e-2;      // merging threshold
    double eps = 1e-6;        // lift-one convergence threshold
    double stop_slack = 1e-6; // relaxation in d(x*) <= p + slack
    int multistart = 5;       // searches per discrete combo
    int max_outer_iter = 100;
    std::uint64_t seed = 0;
    int threads = 1;
    int lbfgs_max_iter = 200;
    double lbfgs_grad_tol = 1e-8;
};

struct SearchResult {
    DesignPoint x_star;
    double d_value = 0.0;
};

struct IterationRecord {
    int iteration = 0;
    int m = 0;
    double objective = 0.0;
    double d_max = 0.0;
    double wall_ms = 0.0;
};

struct ForLionResult {
    ApproximateDesign design;
    std::vector<IterationRecord> log;
    double objective = 0.0;
    double final_d_max = 0.0;
    bool converged = false;
};

// Thrown when the outer loop hits max_outer_iter; carries the best design.
struct MaxIterExceeded : std::runtime_error {
    MaxIterExceeded(const std::string& what, ForLionResult best)
        : std::runtime_error(what), best(std::move(best)) {}
    ForLionResult best;
};

// d(x, xi) = tr(F(xi)^{-1} F_x) evaluated through the generic trace route.
double sensitivity(const ExpectationContext& ctx, const DesignPoint& x, const Matrix& f_inv);

// MLM-only block route: sum_{s,t} u_st tr-blocks through X F^{-1} X^T;
// must agree with the trace route to 1e-10.
double sensitivity_blockform(const ExpectationContext& ctx, const DesignPoint& x,
                             const Matrix& f_inv);

// Gradient of d with respect to the continuous coordinates: closed form for
// GLMs, central differences for MLMs.
std::vector<double> sensitivity_gradient(const ExpectationContext& ctx, const DesignPoint& x,
                                         const Matrix& f_inv);

// Best new point over the whole region for the current design.
SearchResult new_point_search(const ExpectationContext& ctx, const ApproximateDesign& xi,
                              const ForLionConfig& cfg, int outer_iter = 0);

// Merging step of the outer loop: midpoint merges of same-combo pairs closer
// than delta, refused when the merged information would go singular.
ApproximateDesign merge_step(const ExpectationContext& ctx, ApproximateDesign xi, double delta);

ForLionResult forlion_run(const ExpectationContext& ctx, const ForLionConfig& cfg,
                          const ApproximateDesign* init = nullptr);

int liftone_j_eff(const ModelSpec& model);

}  // namespace ewd
