#include "ewd/forlion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ewd/errors.hpp"
#include "ewd/liftone.hpp"
#include "ewd/optimize.hpp"
#include "ewd/parallel.hpp"
#include "ewd/rng.hpp"

namespace ewd {
namespace {

double quad_form(const Matrix& a, std::span<const double> h) {
    const std::vector<double> ah = a * h;
    return dot(h, ah);
}

double trace_product(const Matrix& a, const Matrix& b) {
    double t = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) t += a(r, c) * b(c, r);
    return t;
}

}  // namespace

int liftone_j_eff(const ModelSpec& model) {
    if (is_glm(model)) return 2;
    return std::get<MlmSpec>(model).J;
}

double sensitivity(const ExpectationContext& ctx, const DesignPoint& x, const Matrix& f_inv) {
    if (const auto* g = std::get_if<GlmSpec>(&ctx.model())) {
        const std::vector<double> h = glm_h(*g, x);
        return ctx.glm_nu_mean(h) * quad_form(f_inv, h);
    }
    return trace_product(f_inv, ctx.expected_point_info_uncached(x));
}

double sensitivity_blockform(const ExpectationContext& ctx, const DesignPoint& x,
                             const Matrix& f_inv) {
    const auto* m = std::get_if<MlmSpec>(&ctx.model());
    if (!m) throw ValidationError("sensitivity_blockform is MLM-only");
    const Matrix X = mlm_model_matrix(*m, x);
    const Matrix U = ctx.mlm_mean_U(x);
    const Matrix S = X * f_inv * X.transposed();  // J x J
    double d = 0.0;
    for (int s = 0; s < m->J; ++s)
        for (int t = 0; t < m->J; ++t) d += U(s, t) * S(t, s);
    return d;
}

std::vector<double> sensitivity_gradient(const ExpectationContext& ctx, const DesignPoint& x,
                                         const Matrix& f_inv) {
    const std::size_t k = ctx.region().k();
    std::vector<double> grad(k, 0.0);
    if (k == 0) return grad;

    if (const auto* g = std::get_if<GlmSpec>(&ctx.model())) {
        const std::vector<double> h = glm_h(*g, x);
        const Matrix G = predictor_gradient(ctx.model(), x, k);  // p x k
        const double q = quad_form(f_inv, h);
        const double nu_mean = ctx.glm_nu_mean(h);
        const std::vector<double> ah = f_inv * h;
        const std::vector<double> mprime = ctx.glm_nu_prime_mean_theta(h);
        for (std::size_t j = 0; j < k; ++j) {
            double gm = 0.0, gah = 0.0;
            for (std::size_t r = 0; r < h.size(); ++r) {
                gm += G(r, j) * mprime[r];
                gah += G(r, j) * ah[r];
            }
            grad[j] = q * gm + 2.0 * nu_mean * gah;
        }
        return grad;
    }

    // MLM: central differences scaled per axis
    DesignPoint xp = x, xm = x;
    for (std::size_t j = 0; j < k; ++j) {
        const double step = 1e-6 * (ctx.region().upper(j) - ctx.region().lower(j));
        xp.coords[j] = x.coords[j] + step;
        xm.coords[j] = x.coords[j] - step;
        const double dp = sensitivity_blockform(ctx, xp, f_inv);
        const double dm = sensitivity_blockform(ctx, xm, f_inv);
        grad[j] = (dp - dm) / (2.0 * step);
        xp.coords[j] = x.coords[j];
        xm.coords[j] = x.coords[j];
    }
    return grad;
}

SearchResult new_point_search(const ExpectationContext& ctx, const ApproximateDesign& xi,
                              const ForLionConfig& cfg, int outer_iter) {
    const DesignRegion& region = ctx.region();
    const std::size_t k = region.k();
    const Matrix f_inv = inverse(ctx.design_info(xi));
    const bool glm = is_glm(ctx.model());

    std::vector<SearchResult> per_combo(region.num_combos());

    parallel_for(region.num_combos(), cfg.threads, [&](std::size_t ci) {
        if (k == 0) {
            const DesignPoint x = region.make_point({}, ci);
            per_combo[ci] = {x, sensitivity(ctx, x, f_inv)};
            return;
        }

        auto fg = [&](std::span<const double> cont, std::span<double> grad) {
            const DesignPoint x = region.make_point(cont, ci);
            const std::vector<double> gv = sensitivity_gradient(ctx, x, f_inv);
            std::copy(gv.begin(), gv.end(), grad.begin());
            return glm ? sensitivity(ctx, x, f_inv) : sensitivity_blockform(ctx, x, f_inv);
        };

        std::vector<double> lo(k), hi(k);
        for (std::size_t j = 0; j < k; ++j) {
            lo[j] = region.lower(j);
            hi[j] = region.upper(j);
        }

        // starts: box center, support points on this combo, then random
        std::vector<std::vector<double>> starts;
        std::vector<double> center(k);
        for (std::size_t j = 0; j < k; ++j) center[j] = 0.5 * (lo[j] + hi[j]);
        starts.push_back(center);
        for (const DesignPoint& sp : xi.points) {
            if (region.combo_index_of(sp) == static_cast<int>(ci))
                starts.emplace_back(sp.coords.begin(), sp.coords.begin() + k);
        }
        for (int s = 0; s < cfg.multistart; ++s) {
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(outer_iter), ci,
                                static_cast<std::uint64_t>(s)));
            std::vector<double> x0(k);
            for (std::size_t j = 0; j < k; ++j) x0[j] = rng.uniform(lo[j], hi[j]);
            starts.push_back(std::move(x0));
        }

        BoxAscentOptions opt;
        opt.max_iter = cfg.lbfgs_max_iter;
        opt.grad_tol = cfg.lbfgs_grad_tol;

        SearchResult best;
        bool first = true;
        for (const auto& x0 : starts) {
            const BoxAscentResult r = maximize_box(fg, lo, hi, x0, opt);
            if (first || r.f > best.d_value) {
                best = {region.make_point(r.x, ci), r.f};
                first = false;
            }
        }
        per_combo[ci] = std::move(best);
    });

    // deterministic reduction: strictly-greater wins, ties keep lowest index
    SearchResult best = per_combo.front();
    for (std::size_t ci = 1; ci < per_combo.size(); ++ci)
        if (per_combo[ci].d_value > best.d_value) best = per_combo[ci];
    return best;
}

ApproximateDesign merge_step(const ExpectationContext& ctx, ApproximateDesign xi, double delta) {
    const std::size_t k = ctx.region().k();
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < xi.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < xi.size() && !merged; ++j) {
                // midpoints across different combos may leave the region, so
                // only same-combo pairs are candidates
                const double dij = distance(xi.points[i], xi.points[j], k, DistanceMode::Rounding);
                if (!(dij < delta)) continue;
                ApproximateDesign merged_xi = xi;
                for (std::size_t c = 0; c < k; ++c)
                    merged_xi.points[i].coords[c] =
                        0.5 * (xi.points[i].coords[c] + xi.points[j].coords[c]);
                merged_xi.weights[i] += merged_xi.weights[j];
                merged_xi.points.erase(merged_xi.points.begin() + static_cast<long>(j));
                merged_xi.weights.erase(merged_xi.weights.begin() + static_cast<long>(j));
                if (ctx.ew_objective(merged_xi) > 0.0) {
                    xi = std::move(merged_xi);
                    merged = true;
                }
            }
        }
    }
    return xi;
}

namespace {

ApproximateDesign initial_design(const ExpectationContext& ctx, const ForLionConfig& cfg) {
    const DesignRegion& region = ctx.region();
    const std::size_t k = region.k();
    const std::size_t p = ctx.p();
    const std::size_t cap = std::min<std::size_t>(4 * p, 200);

    // corner pool: every combo crossed with every corner of the box
    std::vector<DesignPoint> pool;
    const std::size_t corners = std::size_t{1} << std::min<std::size_t>(k, 16);
    std::vector<double> cont(k);
    for (std::size_t ci = 0; ci < region.num_combos(); ++ci) {
        for (std::size_t mask = 0; mask < corners; ++mask) {
            for (std::size_t j = 0; j < k; ++j)
                cont[j] = (mask >> j) & 1 ? region.upper(j) : region.lower(j);
            pool.push_back(region.make_point(cont, ci));
        }
    }
    Rng rng(derive_seed(cfg.seed, 0x1417));
    if (pool.size() > cap) {
        rng.shuffle(pool);
        pool.resize(cap);
    }

    auto uniform_design = [](std::vector<DesignPoint> pts) {
        ApproximateDesign xi;
        xi.weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
        xi.points = std::move(pts);
        return xi;
    };

    ApproximateDesign xi = uniform_design(pool);
    for (int attempt = 0; ctx.ew_objective(xi) <= 0.0; ++attempt) {
        if (attempt >= 10)
            throw SingularStart("forlion: could not build a nonsingular initial design");
        std::vector<DesignPoint> pts = pool;
        for (std::size_t extra = 0; extra < std::max<std::size_t>(p, 4); ++extra) {
            for (std::size_t j = 0; j < k; ++j)
                cont[j] = rng.uniform(region.lower(j), region.upper(j));
            pts.push_back(region.make_point(cont, rng.below(region.num_combos())));
        }
        xi = uniform_design(std::move(pts));
    }
    return xi;
}

}  // namespace

ForLionResult forlion_run(const ExpectationContext& ctx, const ForLionConfig& cfg,
                          const ApproximateDesign* init) {
    const double p = static_cast<double>(ctx.p());

    ApproximateDesign xi;
    if (init) {
        validate(*init, 1e-9);
        xi = *init;
        // keep the weight-sum invariant exact from the start
        double sum = 0.0;
        for (double w : xi.weights) sum += w;
        for (double& w : xi.weights) w /= sum;
        if (ctx.ew_objective(xi) <= 0.0)
            throw SingularStart("forlion: provided initial design is singular");
    } else {
        xi = initial_design(ctx, cfg);
    }

    ForLionResult res;
    LiftOneOptions lopt;
    // A sensitivity gap of eps at a support point is worth only ~eps^2 in
    // relative objective improvement, so the inner weight optimization must
    // run to a quadratically tighter threshold than the stopping rule or the
    // outer loop stalls just above p + eps.
    lopt.eps = std::max(cfg.eps * cfg.eps, 1e-14);
    lopt.max_sweeps = 5000;
    lopt.seed = cfg.seed;
    lopt.j_eff = liftone_j_eff(ctx.model());

    for (int iter = 1; iter <= cfg.max_outer_iter; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();

        xi = merge_step(ctx, std::move(xi), cfg.delta);

        std::vector<Matrix> infos;
        infos.reserve(xi.size());
        for (const DesignPoint& x : xi.points) infos.push_back(ctx.expected_point_info(x));
        const LiftOneResult lr = liftone_optimize(infos, lopt, xi.weights);
        xi.weights = lr.weights;

        // deleting step
        for (std::size_t i = xi.size(); i-- > 0;) {
            if (xi.weights[i] <= 1e-15) {
                xi.points.erase(xi.points.begin() + static_cast<long>(i));
                xi.weights.erase(xi.weights.begin() + static_cast<long>(i));
            }
        }

        const double objective = ctx.ew_objective(xi);
        const SearchResult sr = new_point_search(ctx, xi, cfg, iter);

        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        res.log.push_back({iter, static_cast<int>(xi.size()), objective, sr.d_value, ms});

        if (sr.d_value <= p + cfg.stop_slack) {
            res.design = std::move(xi);
            res.objective = objective;
            res.final_d_max = sr.d_value;
            res.converged = true;
            return res;
        }
        xi.points.push_back(sr.x_star);
        xi.weights.push_back(0.0);
    }

    res.design = std::move(xi);
    res.objective = ctx.ew_objective(res.design);
    res.converged = false;
    throw MaxIterExceeded("forlion: max_outer_iter reached before equivalence bound", res);
}

}  // namespace ewd
