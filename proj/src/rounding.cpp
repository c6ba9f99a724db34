#include "ewd/rounding.hpp"

#include <cmath>

#include "ewd/errors.hpp"

namespace ewd {
namespace {

double allocation_objective(const ExpectationContext& ctx, const std::vector<DesignPoint>& points,
                            const std::vector<long>& counts, long n) {
    ApproximateDesign xi;
    xi.points = points;
    xi.weights.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        xi.weights[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    Matrix F(ctx.p(), ctx.p());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (xi.weights[i] == 0.0) continue;
        F.add_scaled(ctx.expected_point_info(xi.points[i]), xi.weights[i]);
    }
    return det(F);
}

}  // namespace

std::vector<long> greedy_unit_assign(const ExpectationContext& ctx,
                                     const std::vector<DesignPoint>& points,
                                     const std::vector<double>& weights, std::vector<long> counts,
                                     long n) {
    long assigned = 0;
    for (long c : counts) assigned += c;
    while (assigned < n) {
        int best = -1;
        double best_det = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double target = static_cast<double>(n) * weights[i];
            if (!(target > static_cast<double>(counts[i]) + 1e-9)) continue;  // n w_i > n_i
            ++counts[i];
            const double d = allocation_objective(ctx, points, counts, n);
            --counts[i];
            if (d > best_det) {
                best_det = d;
                best = static_cast<int>(i);
            }
        }
        if (best < 0) break;  // no eligible point left
        ++counts[static_cast<std::size_t>(best)];
        ++assigned;
    }
    return counts;
}

RoundingReport round_design(const ExpectationContext& ctx, const ApproximateDesign& input,
                            const RoundingConfig& cfg) {
    const DesignRegion& region = ctx.region();
    const std::size_t k = region.k();
    if (cfg.n < 1) throw ValidationError("rounding: n must be >= 1");
    if (cfg.grid_levels.size() != k)
        throw ValidationError("rounding: need one grid level per continuous factor");
    for (double L : cfg.grid_levels)
        if (!(L > 0.0)) throw ValidationError("rounding: grid levels must be positive");
    for (double w : input.weights)
        if (!(w > 0.0)) throw ValidationError("rounding: input weights must be positive");

    const double det_input = ctx.ew_objective(input);
    if (!(det_input > 0.0)) throw SingularMatrix("rounding: input design information is singular");

    // Step 1: weighted-centroid merging, distance infinite across combos.
    ApproximateDesign xi = input;
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < xi.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < xi.size() && !merged; ++j) {
                const double dij = distance(xi.points[i], xi.points[j], k, DistanceMode::Rounding);
                if (!(dij < cfg.delta_r)) continue;
                ApproximateDesign tent = xi;
                const double wi = xi.weights[i], wj = xi.weights[j];
                for (std::size_t c = 0; c < k; ++c)
                    tent.points[i].coords[c] =
                        (wi * xi.points[i].coords[c] + wj * xi.points[j].coords[c]) / (wi + wj);
                tent.weights[i] = wi + wj;
                tent.points.erase(tent.points.begin() + static_cast<long>(j));
                tent.weights.erase(tent.weights.begin() + static_cast<long>(j));
                if (ctx.ew_objective(tent) > 0.0) {
                    xi = std::move(tent);
                    merged = true;
                }
            }
        }
    }

    // Step 2: snap continuous coordinates to the nearest grid multiple,
    // halves away from zero.
    for (DesignPoint& x : xi.points) {
        for (std::size_t j = 0; j < k; ++j) {
            const double L = cfg.grid_levels[j];
            x.coords[j] = std::round(x.coords[j] / L) * L;
        }
    }

    // Step 3: floors, then greedy remainder units.
    std::vector<long> counts(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i)
        counts[i] = static_cast<long>(std::floor(static_cast<double>(cfg.n) * xi.weights[i]));
    counts = greedy_unit_assign(ctx, xi.points, xi.weights, std::move(counts), cfg.n);

    // Step 4: drop empty points.
    RoundingReport report;
    ExactDesign& out = report.design;
    out.n = cfg.n;
    long total = 0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (counts[i] == 0) continue;
        out.points.push_back(xi.points[i]);
        out.counts.push_back(counts[i]);
        total += counts[i];
    }
    if (out.points.empty()) throw AllPointsDropped("rounding: every point received zero units");
    if (total != cfg.n)
        throw AllPointsDropped("rounding: allocated " + std::to_string(total) + " of " +
                               std::to_string(cfg.n) + " units");

    const double det_exact = allocation_objective(ctx, out.points, out.counts, out.n);
    report.info_nonsingular = det_exact > 0.0;
    report.relative_efficiency =
        det_exact > 0.0 ? std::pow(det_exact / det_input, 1.0 / static_cast<double>(ctx.p())) : 0.0;
    return report;
}

}  // namespace ewd
