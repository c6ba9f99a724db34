#include "ewd/liftone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ewd/errors.hpp"
#include "ewd/rng.hpp"
#include "ewd/roots.hpp"

namespace ewd {
namespace {

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

// M(z) = (1-z) R + z F_i where R is the design with point i removed and the
// rest renormalized; det(M(w_i)) reproduces the current objective exactly.
struct ProfilePath {
    Matrix rest;  // R
    const Matrix* lifted;

    double eval(double z) const {
        Matrix m = rest;
        m *= (1.0 - z);
        m.add_scaled(*lifted, z);
        return det(m);
    }
};

ProfilePath make_path(std::span<const Matrix> infos, std::span<const double> w, int i) {
    const std::size_t p = infos[static_cast<std::size_t>(i)].rows();
    Matrix rest(p, p);
    const double denom = 1.0 - w[static_cast<std::size_t>(i)];
    if (denom > 1e-12) {
        for (std::size_t j = 0; j < infos.size(); ++j) {
            if (static_cast<int>(j) == i) continue;
            rest.add_scaled(infos[j], w[j] / denom);
        }
    }
    return {std::move(rest), &infos[static_cast<std::size_t>(i)]};
}

// Coefficients of f_i'(z) = 0 rewritten as a polynomial A_deg z^deg + ... +
// A_0 = 0 for J = 2..5; a vanishing leading coefficient cascades down inside
// the root solver.
std::vector<double> stationarity_coeffs_ascending(const std::vector<double>& b, int p_, int J) {
    const double p = static_cast<double>(p_);
    switch (J) {
        case 2: {
            const double b0 = b[0], b1 = b[1];
            return {p * b0 - b1, p * (b1 - b0)};
        }
        case 3: {
            const double b0 = b[0], b1 = b[1], b2 = b[2];
            return {b0 * p - b1, b1 * (1.0 + p) - 2.0 * (b0 * p + b2), p * (b0 - b1 + b2)};
        }
        case 4: {
            const double b0 = b[0], b1 = b[1], b2 = b[2], b3 = b[3];
            return {b0 * p - b1,
                    -3.0 * b0 * p + b1 * (2.0 + p) - 2.0 * b2,
                    3.0 * b0 * p - b1 * (1.0 + 2.0 * p) + b2 * (2.0 + p) - 3.0 * b3,
                    p * (-b0 + b1 - b2 + b3)};
        }
        case 5: {
            const double b0 = b[0], b1 = b[1], b2 = b[2], b3 = b[3], b4 = b[4];
            return {b0 * p - b1,
                    -4.0 * b0 * p + b1 * (3.0 + p) - 2.0 * b2,
                    6.0 * b0 * p - 3.0 * b1 * (1.0 + p) + b2 * (4.0 + p) - 3.0 * b3,
                    -4.0 * b0 * p + b1 * (1.0 + 3.0 * p) - 2.0 * b2 * (1.0 + p) +
                        b3 * (3.0 + p) - 4.0 * b4,
                    p * (b0 - b1 + b2 - b3 + b4)};
        }
        default: return {};
    }
}

double cond_1norm(const Matrix& m) {
    auto norm1 = [](const Matrix& a) {
        double best = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < a.rows(); ++r) s += std::fabs(a(r, c));
            best = std::max(best, s);
        }
        return best;
    };
    try {
        return norm1(m) * norm1(inverse(m));
    } catch (const SingularMatrix&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

double LiftOneProfile::eval(double z) const {
    const int J = j_eff;
    double s = 0.0;
    for (int j = 0; j < J; ++j) s += b[static_cast<std::size_t>(j)] * ipow(z, j) * ipow(1.0 - z, J - 1 - j);
    return ipow(1.0 - z, p - J + 1) * s;
}

LiftOneProfile lift_profile(std::span<const Matrix> point_infos, std::span<const double> weights,
                            int i, int j_eff) {
    const int J = j_eff;
    const int p = static_cast<int>(point_infos[static_cast<std::size_t>(i)].rows());
    const ProfilePath path = make_path(point_infos, weights, i);

    LiftOneProfile prof;
    prof.index = i;
    prof.p = p;
    prof.j_eff = J;
    prof.current_weight = weights[static_cast<std::size_t>(i)];
    prof.b.assign(static_cast<std::size_t>(J), 0.0);

    const double f0 = path.eval(0.0);
    prof.b[0] = f0;

    // c_j = (j+1)^p j^(J-1-p) f(1/(j+1)) - j^(J-1) f(0), then
    // (b_{J-1},...,b_1) solves the Vandermonde system B_{J-1} x = c.
    const int n = J - 1;
    std::vector<double> c(static_cast<std::size_t>(n));
    bool any_positive = f0 > 0.0;
    for (int j = 1; j <= n; ++j) {
        const double fj = path.eval(1.0 / (j + 1.0));
        any_positive = any_positive || fj > 0.0;
        c[static_cast<std::size_t>(j - 1)] = std::pow(j + 1.0, p) * std::pow(j, J - 1 - p) * fj -
                                             ipow(static_cast<double>(j), J - 1) * f0;
    }
    if (!any_positive) throw DegenerateProfile("lift-one profile is zero everywhere");

    if (n > 0) {
        Matrix B(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        for (int s = 1; s <= n; ++s)
            for (int t = 1; t <= n; ++t)
                B(static_cast<std::size_t>(s - 1), static_cast<std::size_t>(t - 1)) =
                    ipow(static_cast<double>(s), t - 1);
        const LuFactors lu = lu_factor(B);
        const std::vector<double> x = lu_solve(lu, c);
        for (int t = 0; t < n; ++t) prof.b[static_cast<std::size_t>(J - 1 - t)] = x[static_cast<std::size_t>(t)];
    }
    prof.f_current = prof.eval(prof.current_weight);
    return prof;
}

std::pair<double, double> maximize_profile_numeric(const std::function<double(double)>& f, int p) {
    // Fit through Chebyshev-Lobatto nodes on [0,1].
    const int n = p + 1;
    Matrix V(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = 0.5 - 0.5 * std::cos(std::numbers::pi * i / std::max(1, n - 1));
        double pw = 1.0;
        for (int j = 0; j < n; ++j) {
            V(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = pw;
            pw *= x;
        }
        y[static_cast<std::size_t>(i)] = f(x);
    }
    std::vector<double> coeff = lu_solve(lu_factor(V), y);
    // derivative coefficients, ascending
    std::vector<double> dc(coeff.size() > 1 ? coeff.size() - 1 : 1, 0.0);
    for (std::size_t j = 1; j < coeff.size(); ++j) dc[j - 1] = coeff[j] * static_cast<double>(j);
    auto deval = [&](double z) {
        double v = 0.0;
        for (std::size_t j = dc.size(); j-- > 0;) v = v * z + dc[j];
        return v;
    };
    // isolate derivative roots in (0,1) by sign scanning + bisection
    std::vector<double> candidates{0.0};
    const int cells = 2048;
    double prev = deval(0.0);
    for (int i = 1; i <= cells; ++i) {
        const double z = static_cast<double>(i) / cells;
        const double cur = deval(z);
        if ((prev < 0.0) != (cur < 0.0)) {
            double lo = static_cast<double>(i - 1) / cells, hi = z;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((deval(lo) < 0.0) != (deval(mid) < 0.0))
                    hi = mid;
                else
                    lo = mid;
            }
            const double root = 0.5 * (lo + hi);
            if (root > 0.0 && root < 1.0) candidates.push_back(root);
        }
        prev = cur;
    }
    double best_z = 0.0, best_f = f(0.0);
    for (double z : candidates) {
        const double v = f(z);
        if (v > best_f) {
            best_f = v;
            best_z = z;
        }
    }
    return {best_z, best_f};
}

std::pair<double, double> maximize_profile(const LiftOneProfile& profile) {
    const int J = profile.j_eff;
    auto feval = [&](double z) { return profile.eval(z); };

    if (J > 5) return maximize_profile_numeric(feval, profile.p);

    if (J >= 3) {
        // ill-conditioned coefficient systems fall back to the numeric path
        const int n = J - 1;
        Matrix B(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        for (int s = 1; s <= n; ++s)
            for (int t = 1; t <= n; ++t)
                B(static_cast<std::size_t>(s - 1), static_cast<std::size_t>(t - 1)) =
                    ipow(static_cast<double>(s), t - 1);
        if (cond_1norm(B) > 1e12) return maximize_profile_numeric(feval, profile.p);
    }

    const std::vector<double> coeffs = stationarity_coeffs_ascending(profile.b, profile.p, J);
    std::vector<double> roots = solve_poly_real(coeffs);

    double best_z = 0.0;
    double best_f = profile.eval(0.0);
    for (double z : roots) {
        if (z <= 0.0 || z >= 1.0) continue;
        const double v = profile.eval(z);
        if (v > best_f) {
            best_f = v;
            best_z = z;
        }
    }
    return {best_z, best_f};
}

LiftOneResult liftone_optimize(std::span<const Matrix> point_infos, const LiftOneOptions& options,
                               std::span<const double> init) {
    const std::size_t m = point_infos.size();
    if (m == 0) throw ValidationError("liftone_optimize: no points");
    const std::size_t p = point_infos[0].rows();

    std::vector<double> w;
    if (!init.empty()) {
        if (init.size() != m) throw DimensionMismatch("liftone_optimize: init weight length");
        w.assign(init.begin(), init.end());
    } else {
        w.assign(m, 1.0 / static_cast<double>(m));
    }

    auto objective = [&](std::span<const double> ww) {
        Matrix F(p, p);
        for (std::size_t j = 0; j < m; ++j) F.add_scaled(point_infos[j], ww[j]);
        return det(F);
    };

    double f = objective(w);
    for (int attempt = 1; f <= 0.0; ++attempt) {
        if (attempt > 10) throw SingularStart("liftone_optimize: no nonsingular start found");
        Rng rng(derive_seed(options.seed, 0xD1C, static_cast<std::uint64_t>(attempt)));
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            w[j] = -std::log(std::max(rng.uniform01(), 1e-300));
            sum += w[j];
        }
        for (double& v : w) v /= sum;
        f = objective(w);
    }

    LiftOneResult res;
    res.trajectory.push_back(f);

    std::vector<std::size_t> order(m);
    for (std::size_t j = 0; j < m; ++j) order[j] = j;

    int sweep = 0;
    for (; sweep < options.max_sweeps; ++sweep) {
        const double f_start = f;
        if (options.random_order) {
            Rng rng(derive_seed(options.seed, 0x05D3, static_cast<std::uint64_t>(sweep)));
            rng.shuffle(order);
        }
        for (std::size_t idx = 0; idx < m; ++idx) {
            const std::size_t i = order[idx];
            if (w[i] > 1.0 - 1e-12) continue;
            const LiftOneProfile prof = lift_profile(point_infos, w, static_cast<int>(i),
                                                     options.j_eff);
            const auto [z_star, f_star] = maximize_profile(prof);
            if (!(f_star > f * (1.0 + 1e-14))) continue;
            const double scale = (1.0 - z_star) / (1.0 - w[i]);
            for (std::size_t j = 0; j < m; ++j) w[j] *= scale;
            w[i] = z_star;
            double sum = 0.0;
            for (double v : w) sum += v;
            for (double& v : w) v /= sum;
            f = objective(w);
            res.trajectory.push_back(f);
        }
        if (f - f_start < options.eps * f_start) {
            res.converged = true;
            ++sweep;
            break;
        }
    }

    res.weights = std::move(w);
    res.objective = f;
    res.sweeps = sweep;
    return res;
}

}  // namespace ewd
