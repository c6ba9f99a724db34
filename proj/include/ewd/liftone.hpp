#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ewd/matrix.hpp"

namespace ewd {

// Univariate profile of the EW objective when weight z is lifted onto point
// i and the remaining weights are scaled by (1-z)/(1-w_i):
//   f_i(z) = (1-z)^(p-J+1) * sum_{j=0}^{J-1} b_j z^j (1-z)^(J-1-j)
// with J the effective category count (2 for a GLM).
struct LiftOneProfile {
    int index = 0;
    std::vector<double> b;  // b_0 .. b_{J-1}
    int p = 0;
    int j_eff = 2;
    double current_weight = 0.0;
    double f_current = 0.0;  // profile value at z = current_weight

    double eval(double z) const;
};

// Builds the profile from the per-point expected information matrices by
// evaluating the determinant at z = 0 and z = 1/(j+1), j = 1..J-1, and
// solving the Vandermonde system for the b coefficients.
LiftOneProfile lift_profile(std::span<const Matrix> point_infos, std::span<const double> weights,
                            int i, int j_eff);

// Maximizer of f_i over [0,1]: closed-form interior candidates for
// j_eff <= 5, numeric derivative-root isolation beyond (or when the
// coefficient system is ill-conditioned). Returns (z*, f(z*)).
std::pair<double, double> maximize_profile(const LiftOneProfile& profile);

// Numeric fallback: fit a degree-p polynomial through p+1 Chebyshev nodes
// and maximize by isolating the derivative's roots; candidates are re-scored
// with the exact evaluator.
std::pair<double, double> maximize_profile_numeric(const std::function<double(double)>& f, int p);

struct LiftOneOptions {
    double eps = 1e-6;        // relative improvement per sweep to keep going
    int max_sweeps = 200;
    bool random_order = false;  // cyclic by default, reproducible
    std::uint64_t seed = 0;
    int j_eff = 2;
};

struct LiftOneResult {
    std::vector<double> weights;
    double objective = 0.0;
    int sweeps = 0;
    bool converged = false;
    std::vector<double> trajectory;  // objective after each accepted update
};

// EW lift-one over a fixed point set. Starts from `init` when given, else
// uniform weights; retries up to 10 random (Dirichlet) starts when the
// initial information matrix is singular, then throws SingularStart.
LiftOneResult liftone_optimize(std::span<const Matrix> point_infos, const LiftOneOptions& options,
                               std::span<const double> init = {});

}  // namespace ewd
