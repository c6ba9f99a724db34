#pragma once

#include <span>
#include <variant>
#include <vector>

#include "ewd/matrix.hpp"
#include "ewd/region.hpp"
#include "ewd/terms.hpp"

namespace ewd {

enum class Link {
    Logit,
    Probit,
    Cloglog,
    Loglog,
    Identity,  // nu == 1, for tests only
};

struct GlmSpec {
    Link link = Link::Logit;
    std::vector<Predictor> predictors;

    std::size_t p() const { return predictors.size(); }
};

enum class MlmFamily {
    Baseline,
    Cumulative,
    Adjacent,
    Continuation,
};

// Multinomial logistic model. The predictor structure (po/npo/ppo) is fully
// described by the category blocks h_1..h_{J-1} plus the shared block h_c;
// the parameter vector is laid out block by block in that order.
struct MlmSpec {
    MlmFamily family = MlmFamily::Cumulative;
    int J = 3;
    std::vector<std::vector<Predictor>> category_predictors;  // h_j, j = 1..J-1
    std::vector<Predictor> shared_predictors;                 // h_c, may be empty

    std::size_t p() const;
    std::size_t pj(std::size_t j) const { return category_predictors[j].size(); }
    std::size_t pc() const { return shared_predictors.size(); }
};

using ModelSpec = std::variant<GlmSpec, MlmSpec>;

std::size_t model_dim(const ModelSpec& m);  // parameter count p
bool is_glm(const ModelSpec& m);

struct ParamVector {
    std::vector<double> theta;

    std::size_t p() const { return theta.size(); }
};

// Beyond this the GLM weight nu has decayed to its analytic tail limit 0
// for every supported link; returning the limit avoids overflow.
inline constexpr double kEtaGuard = 35.0;

// nu(eta) = ((g^{-1})')^2 / Var, the information weight of one observation.
double glm_nu(Link link, double eta);
double glm_nu_prime(Link link, double eta);

std::vector<double> glm_h(const GlmSpec& spec, const DesignPoint& x);
Matrix glm_info(const GlmSpec& spec, const DesignPoint& x, const ParamVector& theta);

// Category probabilities from the J-1 linear predictors; throws
// InfeasibleParameters when the cumulative ordering is violated.
std::vector<double> mlm_pi(const MlmSpec& spec, std::span<const double> eta);

// d pi / d eta, J x (J-1), closed form per family.
Matrix mlm_dpi_deta(const MlmSpec& spec, std::span<const double> eta);

// J x p block model matrix (category rows, zero last row).
Matrix mlm_model_matrix(const MlmSpec& spec, const DesignPoint& x);

std::vector<double> mlm_eta(const MlmSpec& spec, const Matrix& model_matrix,
                            const ParamVector& theta);

// J x J matrix U with X^T U X the Fisher information of one observation;
// U = D^T diag(pi)^{-1} D with D extended by a zero last column.
Matrix mlm_U(const MlmSpec& spec, const DesignPoint& x, const ParamVector& theta);
Matrix mlm_U_from_eta(const MlmSpec& spec, std::span<const double> eta);

Matrix mlm_info(const MlmSpec& spec, const DesignPoint& x, const ParamVector& theta);

// Per-point Fisher information for either model family.
Matrix point_info(const ModelSpec& model, const DesignPoint& x, const ParamVector& theta);

// p x k matrix of exact partials of the stacked predictor list with respect
// to the continuous coordinates.
Matrix predictor_gradient(const ModelSpec& model, const DesignPoint& x, std::size_t k);

// True when theta is inside the feasible parameter set over the whole region
// (for cumulative MLMs this checks the ordering at every combo x box corner;
// other families are unconstrained).
bool feasible_over_region(const ModelSpec& model, const DesignRegion& region,
                          const ParamVector& theta);

}  // namespace ewd
