#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "ewd/matrix.hpp"
#include "ewd/model.hpp"
#include "ewd/region.hpp"

namespace ewd {

struct PriorCoordinate {
    enum class Kind { Uniform, Normal } kind = Kind::Normal;
    // Uniform: [a, b); Normal: mean a, sd b.
    double a = 0.0;
    double b = 1.0;
};

struct PriorSpec {
    std::vector<PriorCoordinate> coords;
    std::size_t mc_size = 10000;
    std::uint64_t seed = 0;
    bool feasibility_filter = true;
};

// Finite parameter sample {theta_1..theta_B}, given directly or materialized
// once from a prior by fixed-seed Monte Carlo. Freezing the draws makes the
// EW objective a deterministic function, so lift-one monotonicity holds
// exactly.
class ParameterEnsemble {
public:
    static ParameterEnsemble from_samples(std::vector<ParamVector> thetas);
    static ParameterEnsemble from_prior(PriorSpec spec);

    bool is_prior() const { return prior_.has_value(); }
    const std::optional<PriorSpec>& prior() const { return prior_; }

    // For priors this draws the mc_size vectors (rejecting infeasible ones
    // when the filter is on); throws AllDrawsInfeasible after mc_size * 10
    // rejections. Samples are validated against the model dimension.
    std::vector<ParamVector> materialize(const ModelSpec& model, const DesignRegion& region) const;

private:
    std::optional<PriorSpec> prior_;
    std::vector<ParamVector> samples_;
};

// Binds model + region + materialized draws and serves expected information
// matrices, with a per-point cache. Immutable after construction except for
// the cache, which allows concurrent readers and serialized insertion.
class ExpectationContext {
public:
    ExpectationContext(ModelSpec model, DesignRegion region, const ParameterEnsemble& ensemble);

    const ModelSpec& model() const { return model_; }
    const DesignRegion& region() const { return region_; }
    std::size_t p() const { return p_; }
    std::size_t num_draws() const { return draws_.size(); }
    const std::vector<ParamVector>& draws() const { return draws_; }

    // E{F(x, Theta)} averaged over the draws; cached per point.
    Matrix expected_point_info(const DesignPoint& x) const;

    // Same value bypassing the cache (used by cache-transparency checks).
    Matrix expected_point_info_uncached(const DesignPoint& x) const;

    // sum_i w_i E{F(x_i, Theta)}
    Matrix design_info(const ApproximateDesign& xi) const;

    // GLM-only X' W X form; must agree with design_info to 1e-12.
    Matrix design_info_matrix_form(const ApproximateDesign& xi) const;

    double ew_objective(const ApproximateDesign& xi) const;      // |E{F(xi)}|
    double log_ew_objective(const ApproximateDesign& xi) const;  // log|E{F(xi)}|

    // GLM fast path: mean nu and h(x) without forming the p x p matrix.
    double glm_nu_mean(std::span<const double> h) const;
    // Mean of nu'(h'theta) * theta over draws (the A_E gradient ingredient).
    std::vector<double> glm_nu_prime_mean_theta(std::span<const double> h) const;
    // Mean U matrix for MLM at x.
    Matrix mlm_mean_U(const DesignPoint& x) const;

    void clear_cache() const;

private:
    ModelSpec model_;
    DesignRegion region_;
    std::vector<ParamVector> draws_;
    std::size_t p_ = 0;
    std::vector<double> theta_colmajor_;  // p x B, coordinate-major

    mutable std::shared_mutex cache_mutex_;
    mutable std::map<std::vector<double>, Matrix> cache_;
};

// Reads one theta per row, p columns, comma- or whitespace-separated; an
// optional non-numeric header line is skipped.
std::vector<ParamVector> read_theta_csv(const std::string& path);

}  // namespace ewd
