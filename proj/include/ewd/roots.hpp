#pragma once

#include <span>
#include <vector>

namespace ewd {

// Real roots of low-degree polynomials via the classical radical formulas
// (quadratic formula, Cardano with the q^3 + r^2 discriminant branches,
// Ferrari-style quartic radicals evaluated in complex arithmetic). Complex
// roots are discarded; real candidates are Newton-polished. Coefficients are
// given highest degree first; a vanishing leading coefficient cascades to
// the lower-degree solver.

std::vector<double> solve_quadratic(double a2, double a1, double a0);
std::vector<double> solve_cubic(double a3, double a2, double a1, double a0);
std::vector<double> solve_quartic(double a4, double a3, double a2, double a1, double a0);

// Dispatch on the (effective) degree; coeffs are ascending: c[0] + c[1] z + ...
// Degree must be <= 4.
std::vector<double> solve_poly_real(std::span<const double> coeffs_ascending);

}  // namespace ewd
