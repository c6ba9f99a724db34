#pragma once

#include <span>
#include <string>
#include <vector>

namespace ewd {

// Predictors are restricted to sums of products of (possibly transformed)
// factor powers so that their partial derivatives exist in closed form.

enum class FactorTransform {
    Identity,  // x
    Log1p,     // log(1 + x)
};

struct TermFactor {
    int factor = 0;  // 0-based factor index
    int exponent = 1;
    FactorTransform transform = FactorTransform::Identity;
};

struct Term {
    double coeff = 1.0;
    std::vector<TermFactor> factors;  // empty => constant term
};

struct Predictor {
    std::vector<Term> terms;

    double eval(std::span<const double> x) const;
    // d/dx_j, analytic.
    double partial(std::span<const double> x, std::size_t j) const;
    // Largest factor index referenced, or -1 for a pure constant.
    int max_factor_index() const;
};

// Grammar: expr = term ('+' term)*, term = atom ('*' atom)*,
// atom = number | var, var = ("x"N | "log1p(x"N")") ["^" int], N >= 1.
// Examples: "1", "x1", "x1*x2", "2.5*x1^2", "log1p(x1)".
Predictor parse_predictor(const std::string& text);

std::string to_string(const Predictor& p);

}  // namespace ewd
