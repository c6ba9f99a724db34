#include "ewd/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ewd/errors.hpp"
#include "ewd/optimize.hpp"
#include "ewd/parallel.hpp"
#include "ewd/rng.hpp"

namespace ewd {

double quantile_type7(std::vector<double> values, double q) {
    if (values.empty()) throw ValidationError("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Matrix design_info_at(const ModelSpec& model, const ApproximateDesign& xi,
                      const ParamVector& theta) {
    const std::size_t p = model_dim(model);
    Matrix F(p, p);
    for (std::size_t i = 0; i < xi.size(); ++i)
        F.add_scaled(point_info(model, xi.points[i], theta), xi.weights[i]);
    return F;
}

double relative_efficiency(const ModelSpec& model, const ApproximateDesign& xi_a,
                           const ApproximateDesign& xi_b, const ParamVector& theta) {
    const double det_b = det(design_info_at(model, xi_b, theta));
    if (!(det_b > 0.0)) throw ReferenceSingular("reference design information is singular");
    const double det_a = det(design_info_at(model, xi_a, theta));
    if (!(det_a > 0.0)) return 0.0;
    return std::pow(det_a / det_b, 1.0 / static_cast<double>(model_dim(model)));
}

double relative_efficiency(const ExpectationContext& ctx, const ApproximateDesign& xi_a,
                           const ApproximateDesign& xi_b) {
    const double det_b = ctx.ew_objective(xi_b);
    if (!(det_b > 0.0)) throw ReferenceSingular("reference design information is singular");
    const double det_a = ctx.ew_objective(xi_a);
    if (!(det_a > 0.0)) return 0.0;
    return std::pow(det_a / det_b, 1.0 / static_cast<double>(ctx.p()));
}

VerifyReport verify_design(const ExpectationContext& ctx, const ApproximateDesign& xi,
                           int grid_density, double tolerance, int threads, std::uint64_t seed,
                           int multistart) {
    const DesignRegion& region = ctx.region();
    const std::size_t k = region.k();
    const Matrix f_inv = inverse(ctx.design_info(xi));
    const bool glm = is_glm(ctx.model());

    auto d_of = [&](const DesignPoint& x) {
        return glm ? sensitivity(ctx, x, f_inv) : sensitivity_blockform(ctx, x, f_inv);
    };

    struct Candidate {
        double d;
        DesignPoint x;
    };
    std::vector<Candidate> per_combo(region.num_combos());

    parallel_for(region.num_combos(), threads, [&](std::size_t ci) {
        Candidate best{-1.0, region.make_point(std::vector<double>(k, 0.0), ci)};
        if (k == 0) {
            const DesignPoint x = region.make_point({}, ci);
            per_combo[ci] = {d_of(x), x};
            return;
        }
        const long density = std::max(2, grid_density);
        std::vector<double> cont(k);
        std::vector<long> idx(k, 0);
        // tensor grid walk, plus the top cell refined below
        bool done = false;
        while (!done) {
            for (std::size_t j = 0; j < k; ++j) {
                cont[j] = region.lower(j) + (region.upper(j) - region.lower(j)) *
                                                static_cast<double>(idx[j]) /
                                                static_cast<double>(density - 1);
            }
            const DesignPoint x = region.make_point(cont, ci);
            const double d = d_of(x);
            if (d > best.d) best = {d, x};
            // advance multi-index
            std::size_t j = 0;
            for (; j < k; ++j) {
                if (++idx[j] < density) break;
                idx[j] = 0;
            }
            done = j == k;
        }
        per_combo[ci] = std::move(best);
    });

    Candidate best = per_combo.front();
    for (std::size_t ci = 1; ci < per_combo.size(); ++ci)
        if (per_combo[ci].d > best.d) best = per_combo[ci];

    // support points are candidates too
    for (const DesignPoint& x : xi.points) {
        const double d = d_of(x);
        if (d > best.d) best = {d, x};
    }

    // continuous refinement from the best grid point and a few random starts
    if (k > 0) {
        std::vector<double> lo(k), hi(k);
        for (std::size_t j = 0; j < k; ++j) {
            lo[j] = region.lower(j);
            hi[j] = region.upper(j);
        }
        auto refine = [&](std::size_t ci, std::span<const double> x0) {
            auto fg = [&](std::span<const double> cont, std::span<double> grad) {
                const DesignPoint x = region.make_point(cont, ci);
                const std::vector<double> g = sensitivity_gradient(ctx, x, f_inv);
                std::copy(g.begin(), g.end(), grad.begin());
                return d_of(x);
            };
            const BoxAscentResult r = maximize_box(fg, lo, hi, x0);
            if (r.f > best.d) best = {r.f, region.make_point(r.x, ci)};
        };
        const int best_combo = region.combo_index_of(best.x);
        refine(static_cast<std::size_t>(best_combo),
               std::span<const double>(best.x.coords.data(), k));
        for (std::size_t ci = 0; ci < region.num_combos(); ++ci) {
            for (int s = 0; s < multistart; ++s) {
                Rng rng(derive_seed(seed, 0x7E61F7, ci, static_cast<std::uint64_t>(s)));
                std::vector<double> x0(k);
                for (std::size_t j = 0; j < k; ++j) x0[j] = rng.uniform(lo[j], hi[j]);
                refine(ci, x0);
            }
        }
    }

    VerifyReport report;
    report.d_max = best.d;
    report.argmax = best.x;
    report.bound = static_cast<double>(ctx.p()) + tolerance;
    report.pass = best.d <= report.bound;
    return report;
}

std::vector<EfficiencyReport> robustness_study(const ModelSpec& model, const DesignRegion& region,
                                               const std::vector<ApproximateDesign>& designs,
                                               const std::vector<ParamVector>& thetas,
                                               const RobustnessOptions& options) {
    if (designs.empty()) throw ValidationError("robustness_study: no designs");
    const double p = static_cast<double>(model_dim(model));

    // reference determinant per theta
    std::vector<double> ref_det(thetas.size());
    if (options.reference) {
        const ApproximateDesign& ref = designs.at(*options.reference);
        parallel_for(thetas.size(), options.threads, [&](std::size_t t) {
            ref_det[t] = det(design_info_at(model, ref, thetas[t]));
        });
    } else {
        // locally D-optimal reference per theta (B = 1 ensemble), cached on
        // the parameter bytes so repeated thetas are solved once
        std::map<std::vector<double>, double> cache;
        for (std::size_t t = 0; t < thetas.size(); ++t) {
            auto it = cache.find(thetas[t].theta);
            if (it != cache.end()) {
                ref_det[t] = it->second;
                continue;
            }
            const ParameterEnsemble single = ParameterEnsemble::from_samples({thetas[t]});
            const ExpectationContext local_ctx(model, region, single);
            ForLionConfig cfg = options.local_cfg;
            cfg.threads = options.threads;
            const ForLionResult local = forlion_run(local_ctx, cfg);
            ref_det[t] = det(design_info_at(model, local.design, thetas[t]));
            cache.emplace(thetas[t].theta, ref_det[t]);
        }
    }

    for (double rd : ref_det)
        if (!(rd > 0.0)) throw ReferenceSingular("reference design singular under some theta");

    std::vector<EfficiencyReport> reports(designs.size());
    for (std::size_t di = 0; di < designs.size(); ++di) {
        EfficiencyReport& rep = reports[di];
        rep.efficiencies.resize(thetas.size());
        rep.raw_objectives.resize(thetas.size());
        parallel_for(thetas.size(), options.threads, [&](std::size_t t) {
            const double dv = det(design_info_at(model, designs[di], thetas[t]));
            rep.raw_objectives[t] = dv > 0.0 ? std::pow(dv, 1.0 / p) : 0.0;
            rep.efficiencies[t] = dv > 0.0 ? std::pow(dv / ref_det[t], 1.0 / p) : 0.0;
        });
        rep.min = quantile_type7(rep.efficiencies, 0.0);
        rep.q1 = quantile_type7(rep.efficiencies, 0.25);
        rep.median = quantile_type7(rep.efficiencies, 0.5);
        rep.q3 = quantile_type7(rep.efficiencies, 0.75);
        rep.max = quantile_type7(rep.efficiencies, 1.0);
        double s = 0.0;
        for (double e : rep.efficiencies) s += e;
        rep.mean = s / static_cast<double>(rep.efficiencies.size());
    }
    return reports;
}

FrequencyPolygon frequency_polygon(const std::vector<double>& values, int bins) {
    if (values.empty() || bins < 1) throw ValidationError("frequency_polygon: bad input");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    double lo = *mn, hi = *mx;
    if (lo == hi) hi = lo + 1.0;
    FrequencyPolygon fp;
    fp.edges.resize(static_cast<std::size_t>(bins) + 1);
    fp.counts.assign(static_cast<std::size_t>(bins), 0);
    for (int b = 0; b <= bins; ++b)
        fp.edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    for (double v : values) {
        auto b = static_cast<long>((v - lo) / (hi - lo) * bins);
        b = std::clamp<long>(b, 0, bins - 1);
        ++fp.counts[static_cast<std::size_t>(b)];
    }
    return fp;
}

}  // namespace ewd
