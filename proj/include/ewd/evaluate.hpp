#pragma once

#include <optional>
#include <vector>

#include "ewd/expectation.hpp"
#include "ewd/forlion.hpp"
#include "ewd/region.hpp"

namespace ewd {

struct EfficiencyReport {
    std::vector<double> efficiencies;  // per theta
    std::vector<double> raw_objectives;  // |F(xi, theta)|^(1/p) per theta
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
    double mean = 0.0;
};

// Type-7 (linear interpolation) quantile of a sample; q in [0, 1].
double quantile_type7(std::vector<double> values, double q);

// Fisher information of a design at a single parameter vector.
Matrix design_info_at(const ModelSpec& model, const ApproximateDesign& xi,
                      const ParamVector& theta);

// (|F_a| / |F_b|)^(1/p) under one theta; throws ReferenceSingular when the
// reference determinant vanishes, returns 0 when the numerator does.
double relative_efficiency(const ModelSpec& model, const ApproximateDesign& xi_a,
                           const ApproximateDesign& xi_b, const ParamVector& theta);

// Same ratio under the expected information of an ensemble context.
double relative_efficiency(const ExpectationContext& ctx, const ApproximateDesign& xi_a,
                           const ApproximateDesign& xi_b);

struct VerifyReport {
    double d_max = 0.0;
    DesignPoint argmax;
    bool pass = false;
    double bound = 0.0;  // p + tolerance
};

// Equivalence-theorem audit: dense grid (grid_density points per continuous
// axis, all combos, plus the support points) refined by multistart ascent;
// pass iff max d <= p + tolerance.
VerifyReport verify_design(const ExpectationContext& ctx, const ApproximateDesign& xi,
                           int grid_density, double tolerance, int threads = 1,
                           std::uint64_t seed = 0, int multistart = 5);

struct RobustnessOptions {
    // reference design index, or locally D-optimal per theta when unset
    std::optional<std::size_t> reference;
    ForLionConfig local_cfg;  // used for the locally-optimal path
    int threads = 1;
};

// Per-theta relative efficiencies of each design against the reference, plus
// the raw objective values |F(xi, theta)|^(1/p) used for frequency polygons.
std::vector<EfficiencyReport> robustness_study(const ModelSpec& model, const DesignRegion& region,
                                               const std::vector<ApproximateDesign>& designs,
                                               const std::vector<ParamVector>& thetas,
                                               const RobustnessOptions& options);

struct FrequencyPolygon {
    std::vector<double> edges;   // bin_count + 1 edges
    std::vector<long> counts;    // bin_count entries
};

FrequencyPolygon frequency_polygon(const std::vector<double>& values, int bins);

}  // namespace ewd
