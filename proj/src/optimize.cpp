#include "ewd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "ewd/errors.hpp"

namespace ewd {
namespace {

void project(std::span<double> x, std::span<const double> lo, std::span<const double> hi) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], lo[j], hi[j]);
}

// infinity norm of the projected ascent step P(x + g) - x
double projected_grad_norm(std::span<const double> x, std::span<const double> g,
                           std::span<const double> lo, std::span<const double> hi) {
    double n = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double step = std::clamp(x[j] + g[j], lo[j], hi[j]) - x[j];
        n = std::max(n, std::fabs(step));
    }
    return n;
}

}  // namespace

BoxAscentResult maximize_box(
    const std::function<double(std::span<const double>, std::span<double>)>& fg,
    std::span<const double> lower, std::span<const double> upper, std::span<const double> x0,
    const BoxAscentOptions& options) {
    const std::size_t k = x0.size();
    if (lower.size() != k || upper.size() != k)
        throw DimensionMismatch("maximize_box: bound/point size mismatch");

    std::vector<double> x(x0.begin(), x0.end());
    project(x, lower, upper);
    std::vector<double> g(k), xn(k), gn(k), dir(k);
    double f = fg(x, g);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> mem;

    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        if (projected_grad_norm(x, g, lower, upper) <= options.grad_tol) break;

        // two-loop recursion on the ascent direction
        dir.assign(g.begin(), g.end());
        std::vector<double> alpha(mem.size());
        for (std::size_t mi = mem.size(); mi-- > 0;) {
            const Pair& pr = mem[mi];
            double sd = 0.0;
            for (std::size_t j = 0; j < k; ++j) sd += pr.s[j] * dir[j];
            alpha[mi] = pr.rho * sd;
            for (std::size_t j = 0; j < k; ++j) dir[j] -= alpha[mi] * pr.y[j];
        }
        if (!mem.empty()) {
            const Pair& last = mem.back();
            double sy = 0.0, yy = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                sy += last.s[j] * last.y[j];
                yy += last.y[j] * last.y[j];
            }
            if (yy > 0.0) {
                const double gamma = sy / yy;
                for (double& v : dir) v *= gamma;
            }
        }
        for (std::size_t mi = 0; mi < mem.size(); ++mi) {
            const Pair& pr = mem[mi];
            double yd = 0.0;
            for (std::size_t j = 0; j < k; ++j) yd += pr.y[j] * dir[j];
            const double beta = pr.rho * yd;
            for (std::size_t j = 0; j < k; ++j) dir[j] += (alpha[mi] - beta) * pr.s[j];
        }
        // ensure it is still an ascent direction
        double gd = 0.0;
        for (std::size_t j = 0; j < k; ++j) gd += g[j] * dir[j];
        if (gd <= 0.0) {
            dir.assign(g.begin(), g.end());
        }

        // backtracking on the projected path
        bool accepted = false;
        double step = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t j = 0; j < k; ++j) xn[j] = x[j] + step * dir[j];
            project(xn, lower, upper);
            double gdx = 0.0, move = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                gdx += g[j] * (xn[j] - x[j]);
                move = std::max(move, std::fabs(xn[j] - x[j]));
            }
            if (move == 0.0) break;
            const double fn = fg(xn, gn);
            if (fn >= f + 1e-4 * gdx) {
                // curvature update from the accepted move
                Pair pr;
                pr.s.resize(k);
                pr.y.resize(k);
                double sy = 0.0, ss = 0.0, yy = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    pr.s[j] = xn[j] - x[j];
                    pr.y[j] = g[j] - gn[j];  // ascent: y = -(grad_new - grad_old)
                    sy += pr.s[j] * pr.y[j];
                    ss += pr.s[j] * pr.s[j];
                    yy += pr.y[j] * pr.y[j];
                }
                if (sy > 1e-12 * std::sqrt(ss * yy)) {
                    pr.rho = 1.0 / sy;
                    mem.push_back(std::move(pr));
                    if (static_cast<int>(mem.size()) > options.memory) mem.pop_front();
                }
                x = xn;
                g = gn;
                f = fn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (mem.empty()) break;  // converged as far as the model allows
            mem.clear();             // restart with steepest ascent
        }
    }

    return {std::move(x), f, iter};
}

}  // namespace ewd
