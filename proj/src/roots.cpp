#include "ewd/roots.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ewd/errors.hpp"

namespace ewd {
namespace {

using cplx = std::complex<double>;

double poly_eval(std::span<const double> asc, double z) {
    double v = 0.0;
    for (std::size_t i = asc.size(); i-- > 0;) v = v * z + asc[i];
    return v;
}

double poly_deriv_eval(std::span<const double> asc, double z) {
    double v = 0.0;
    for (std::size_t i = asc.size(); i-- > 1;) v = v * z + asc[i] * static_cast<double>(i);
    return v;
}

// Newton steps to take radical-formula roundoff out of each candidate.
// Steps are accepted only when they shrink |f|: at a repeated root f' is
// noise and an unguarded step would throw an already-exact candidate away.
double polish(std::span<const double> asc, double z) {
    double f = poly_eval(asc, z);
    for (int it = 0; it < 24; ++it) {
        const double fp = poly_deriv_eval(asc, z);
        if (fp == 0.0) break;
        const double step = f / fp;
        const double zn = z - step;
        const double fn = poly_eval(asc, zn);
        if (!(std::fabs(fn) < std::fabs(f))) break;
        z = zn;
        f = fn;
        if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(z))) break;
    }
    return z;
}

void finish(std::span<const double> asc, std::vector<double>& roots) {
    for (double& z : roots) z = polish(asc, z);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) {
                                return std::fabs(a - b) <= 1e-8 * (1.0 + std::fabs(a));
                            }),
                roots.end());
}

bool all_finite(std::span<const cplx> vs) {
    for (const cplx& v : vs)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

// Durand-Kerner on the monic polynomial; backstop for inputs where the
// radical expressions degenerate (repeated roots making D* or A* vanish).
std::vector<double> durand_kerner(std::span<const double> asc) {
    const std::size_t deg = asc.size() - 1;
    std::vector<cplx> monic(deg);
    for (std::size_t i = 0; i < deg; ++i) monic[i] = asc[i] / asc[deg];
    auto eval = [&](cplx z) {
        cplx v = 1.0;
        for (std::size_t i = deg; i-- > 0;) v = v * z + monic[i];
        return v;
    };
    std::vector<cplx> r(deg);
    r[0] = cplx(0.4, 0.9);
    for (std::size_t i = 1; i < deg; ++i) r[i] = r[i - 1] * cplx(0.4, 0.9);
    for (int it = 0; it < 300; ++it) {
        double shift = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            cplx denom = 1.0;
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) denom *= r[i] - r[j];
            if (denom == cplx(0.0, 0.0)) {
                r[i] += cplx(1e-6, 1e-6);
                continue;
            }
            const cplx delta = eval(r[i]) / denom;
            r[i] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-14) break;
    }
    std::vector<double> out;
    for (const cplx& z : r)
        if (std::fabs(z.imag()) <= 1e-7 * (1.0 + std::fabs(z.real()))) out.push_back(z.real());
    return out;
}

std::vector<double> take_reals(std::span<const cplx> zs) {
    std::vector<double> out;
    for (const cplx& z : zs)
        if (std::fabs(z.imag()) <= 1e-6 * (1.0 + std::fabs(z.real()))) out.push_back(z.real());
    return out;
}

}  // namespace

std::vector<double> solve_quadratic(double a2, double a1, double a0) {
    const double scale = std::max({std::fabs(a2), std::fabs(a1), std::fabs(a0)});
    if (scale == 0.0) return {};
    if (std::fabs(a2) <= 1e-14 * scale) {
        if (std::fabs(a1) <= 1e-14 * scale) return {};  // constant, no roots
        std::vector<double> roots{-a0 / a1};
        const double asc[] = {a0, a1};
        finish(asc, roots);
        return roots;
    }
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    const double asc[] = {a0, a1, a2};
    std::vector<double> roots;
    if (disc > 0.0) {
        // the numerically stable pairing: larger-magnitude root first
        const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
        roots = {q / a2, q != 0.0 ? a0 / q : -a1 / (2.0 * a2)};
    } else if (disc == 0.0) {
        roots = {-a1 / (2.0 * a2)};
    }
    finish(asc, roots);
    return roots;
}

std::vector<double> solve_cubic(double a3c, double a2c, double a1c, double a0c) {
    const double scale = std::max({std::fabs(a3c), std::fabs(a2c), std::fabs(a1c), std::fabs(a0c)});
    if (scale == 0.0) return {};
    if (std::fabs(a3c) <= 1e-14 * scale) return solve_quadratic(a2c, a1c, a0c);

    const double a2 = a2c / a3c, a1 = a1c / a3c, a0 = a0c / a3c;
    const double asc[] = {a0, a1, a2, 1.0};

    const double q = a1 / 3.0 - a2 * a2 / 9.0;
    const double r = (a1 * a2 - 3.0 * a0) / 6.0 - a2 * a2 * a2 / 27.0;
    const double disc = q * q * q + r * r;

    std::vector<double> roots;
    if (disc > 0.0) {
        const double s1 = std::cbrt(r + std::sqrt(disc));
        const double s2 = std::cbrt(r - std::sqrt(disc));
        roots = {s1 + s2 - a2 / 3.0};
    } else if (disc == 0.0) {
        const double rc = std::cbrt(r);
        roots = {2.0 * rc - a2 / 3.0, -rc - a2 / 3.0};
    } else {
        // casus irreducibilis: principal complex cube roots, three real roots
        const cplx root_disc = std::sqrt(cplx(disc, 0.0));
        const cplx s1 = std::pow(cplx(r, 0.0) + root_disc, 1.0 / 3.0);
        const cplx s2 = std::pow(cplx(r, 0.0) - root_disc, 1.0 / 3.0);
        const cplx i_sqrt3_half = cplx(0.0, std::sqrt(3.0) / 2.0);
        const cplx z1 = s1 + s2 - a2 / 3.0;
        const cplx z2 = -(s1 + s2) / 2.0 - a2 / 3.0 + i_sqrt3_half * (s1 - s2);
        const cplx z3 = -(s1 + s2) / 2.0 - a2 / 3.0 - i_sqrt3_half * (s1 - s2);
        const cplx zs[] = {z1, z2, z3};
        if (!all_finite(zs)) {
            roots = durand_kerner(asc);
        } else {
            roots = take_reals(zs);
        }
    }
    finish(asc, roots);
    return roots;
}

std::vector<double> solve_quartic(double a4c, double a3c, double a2c, double a1c, double a0c) {
    const double scale = std::max({std::fabs(a4c), std::fabs(a3c), std::fabs(a2c), std::fabs(a1c),
                                   std::fabs(a0c)});
    if (scale == 0.0) return {};
    if (std::fabs(a4c) <= 1e-14 * scale) return solve_cubic(a3c, a2c, a1c, a0c);

    const double a3 = a3c / a4c, a2 = a2c / a4c, a1 = a1c / a4c, a0 = a0c / a4c;
    const double asc[] = {a0, a1, a2, a3, 1.0};

    const double E = 12.0 * a0 + a2 * a2 - 3.0 * a1 * a3;
    const double F = 27.0 * a1 * a1 - 72.0 * a0 * a2 + 2.0 * a2 * a2 * a2 -
                     9.0 * a1 * a2 * a3 + 27.0 * a0 * a3 * a3;

    const cplx D = std::pow(cplx(F, 0.0) + std::sqrt(cplx(F * F - 4.0 * E * E * E, 0.0)),
                            1.0 / 3.0);
    std::vector<double> roots;
    bool degenerate = std::abs(D) < 1e-12 * (1.0 + std::fabs(E));
    if (!degenerate) {
        const double cbrt2 = std::cbrt(2.0);
        const cplx G = D + (cbrt2 * cbrt2) * E / D;
        const cplx A = -2.0 * a2 / 3.0 + a3 * a3 / 4.0 + G / (3.0 * cbrt2);
        const cplx sqrtA = std::sqrt(A);
        degenerate = std::abs(sqrtA) < 1e-10 * (1.0 + std::fabs(a2) + a3 * a3);
        if (!degenerate) {
            const cplx base = -4.0 * a2 / 3.0 + a3 * a3 / 2.0 - G / (3.0 * cbrt2);
            const cplx tail = (-8.0 * a1 + 4.0 * a2 * a3 - a3 * a3 * a3) / (4.0 * sqrtA);
            const cplx B = base - tail;
            const cplx C = base + tail;
            const cplx sqrtB = std::sqrt(B);
            const cplx sqrtC = std::sqrt(C);
            const cplx zs[] = {
                -a3 / 4.0 - sqrtA / 2.0 + sqrtB / 2.0,
                -a3 / 4.0 - sqrtA / 2.0 - sqrtB / 2.0,
                -a3 / 4.0 + sqrtA / 2.0 + sqrtC / 2.0,
                -a3 / 4.0 + sqrtA / 2.0 - sqrtC / 2.0,
            };
            if (all_finite(zs)) roots = take_reals(zs);
            else degenerate = true;
        }
    }
    if (degenerate) roots = durand_kerner(asc);

    // Radical roots through principal branches can drift on nearly repeated
    // roots; discard candidates Newton cannot pull onto the polynomial.
    for (double& z : roots) z = polish(asc, z);
    std::vector<double> kept;
    double coeff_scale = 0.0;
    for (double c : asc) coeff_scale = std::max(coeff_scale, std::fabs(c));
    for (double z : roots) {
        const double zmag = std::max(1.0, std::fabs(z));
        const double tol = 1e-7 * coeff_scale * zmag * zmag * zmag * zmag;
        if (std::fabs(poly_eval(asc, z)) <= tol) kept.push_back(z);
    }
    if (kept.empty() && !degenerate) {
        kept = durand_kerner(asc);
        for (double& z : kept) z = polish(asc, z);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end(),
                           [](double a, double b) {
                               return std::fabs(a - b) <= 1e-8 * (1.0 + std::fabs(a));
                           }),
               kept.end());
    return kept;
}

std::vector<double> solve_poly_real(std::span<const double> c) {
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return {};
    std::size_t deg = c.size() - 1;
    while (deg > 0 && std::fabs(c[deg]) <= 1e-14 * scale) --deg;
    switch (deg) {
        case 0: return {};
        case 1: return solve_quadratic(0.0, c[1], c[0]);
        case 2: return solve_quadratic(c[2], c[1], c[0]);
        case 3: return solve_cubic(c[3], c[2], c[1], c[0]);
        case 4: return solve_quartic(c[4], c[3], c[2], c[1], c[0]);
        default: throw ValidationError("solve_poly_real supports degree <= 4");
    }
}

}  // namespace ewd
