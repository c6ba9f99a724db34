#include "ewd/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ewd/errors.hpp"

namespace ewd {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399;  // 1/sqrt(2*pi)

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double logistic(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double t = std::exp(eta);
    return t / (1.0 + t);
}

double nu_cloglog(double eta) {
    const double t = std::exp(eta);
    const double q = std::exp(-t);
    const double one_minus_q = -std::expm1(-t);  // stable for small t
    if (one_minus_q <= 0.0) return 0.0;
    return t * t * q / one_minus_q;
}

double nu_prime_cloglog(double eta) {
    const double t = std::exp(eta);
    const double q = std::exp(-t);
    const double one_minus_q = -std::expm1(-t);
    if (one_minus_q <= 0.0) return 0.0;
    // d/deta = t * d/dt of t^2 q / (1-q)
    const double a = (2.0 * t * q - t * t * q) / one_minus_q;
    const double b = t * t * q * q / (one_minus_q * one_minus_q);
    return t * (a - b);
}

}  // namespace

std::size_t MlmSpec::p() const {
    std::size_t n = shared_predictors.size();
    for (const auto& h : category_predictors) n += h.size();
    return n;
}

std::size_t model_dim(const ModelSpec& m) {
    if (const auto* g = std::get_if<GlmSpec>(&m)) return g->p();
    return std::get<MlmSpec>(m).p();
}

bool is_glm(const ModelSpec& m) { return std::holds_alternative<GlmSpec>(m); }

double glm_nu(Link link, double eta) {
    if (link == Link::Identity) return 1.0;
    if (std::fabs(eta) > kEtaGuard) return 0.0;
    switch (link) {
        case Link::Logit: {
            const double s = logistic(eta);
            return s * (1.0 - s);
        }
        case Link::Probit: {
            const double phi = norm_pdf(eta);
            const double Phi = norm_cdf(eta);
            const double denom = Phi * (1.0 - Phi);
            return denom > 0.0 ? phi * phi / denom : 0.0;
        }
        case Link::Cloglog: return nu_cloglog(eta);
        case Link::Loglog: return nu_cloglog(-eta);
        case Link::Identity: break;
    }
    return 1.0;
}

double glm_nu_prime(Link link, double eta) {
    if (link == Link::Identity) return 0.0;
    if (std::fabs(eta) > kEtaGuard) return 0.0;
    switch (link) {
        case Link::Logit: {
            const double s = logistic(eta);
            return s * (1.0 - s) * (1.0 - 2.0 * s);
        }
        case Link::Probit: {
            const double phi = norm_pdf(eta);
            const double Phi = norm_cdf(eta);
            const double denom = Phi * (1.0 - Phi);
            if (denom <= 0.0) return 0.0;
            return phi * phi * (-2.0 * eta * denom - phi * (1.0 - 2.0 * Phi)) / (denom * denom);
        }
        case Link::Cloglog: return nu_prime_cloglog(eta);
        case Link::Loglog: return -nu_prime_cloglog(-eta);
        case Link::Identity: break;
    }
    return 0.0;
}

std::vector<double> glm_h(const GlmSpec& spec, const DesignPoint& x) {
    std::vector<double> h(spec.p());
    for (std::size_t i = 0; i < spec.p(); ++i) h[i] = spec.predictors[i].eval(x.coords);
    return h;
}

Matrix glm_info(const GlmSpec& spec, const DesignPoint& x, const ParamVector& theta) {
    if (theta.p() != spec.p()) throw DimensionMismatch("glm_info: theta length != p");
    const std::vector<double> h = glm_h(spec, x);
    const double eta = dot(h, theta.theta);
    return outer_scaled(h, glm_nu(spec.link, eta));
}

std::vector<double> mlm_pi(const MlmSpec& spec, std::span<const double> eta) {
    const int J = spec.J;
    if (eta.size() != static_cast<std::size_t>(J - 1))
        throw DimensionMismatch("mlm_pi: eta must have J-1 entries");
    std::vector<double> pi(J, 0.0);
    switch (spec.family) {
        case MlmFamily::Baseline: {
            // pi_j proportional to exp(eta_j), pi_J to 1
            double mx = 0.0;
            for (double e : eta) mx = std::max(mx, e);
            double z = std::exp(-mx);
            for (int j = 0; j < J - 1; ++j) {
                pi[j] = std::exp(eta[j] - mx);
                z += pi[j];
            }
            pi[J - 1] = std::exp(-mx);
            for (double& v : pi) v /= z;
            break;
        }
        case MlmFamily::Cumulative: {
            for (int j = 0; j + 1 < J - 1; ++j)
                if (!(eta[j] < eta[j + 1]))
                    throw InfeasibleParameters("cumulative model requires eta strictly increasing");
            double prev = 0.0;
            for (int j = 0; j < J - 1; ++j) {
                const double g = logistic(eta[j]);
                pi[j] = g - prev;
                prev = g;
            }
            pi[J - 1] = 1.0 - prev;
            break;
        }
        case MlmFamily::Adjacent: {
            // log(pi_j / pi_{j+1}) = eta_j  =>  pi_j ~ exp(sum_{l>=j} eta_l)
            std::vector<double> s(J, 0.0);
            for (int j = J - 2; j >= 0; --j) s[j] = s[j + 1] + eta[j];
            const double mx = *std::max_element(s.begin(), s.end());
            double z = 0.0;
            for (int j = 0; j < J; ++j) {
                pi[j] = std::exp(s[j] - mx);
                z += pi[j];
            }
            for (double& v : pi) v /= z;
            break;
        }
        case MlmFamily::Continuation: {
            // log(pi_j / (pi_{j+1} + ... + pi_J)) = eta_j
            double rest = 1.0;
            for (int j = 0; j < J - 1; ++j) {
                const double s = logistic(eta[j]);
                pi[j] = s * rest;
                rest *= (1.0 - s);
            }
            pi[J - 1] = rest;
            break;
        }
    }
    for (double v : pi) {
        if (!(v > 0.0))
            throw InfeasibleParameters("category probability underflowed to zero");
    }
    return pi;
}

Matrix mlm_dpi_deta(const MlmSpec& spec, std::span<const double> eta) {
    const int J = spec.J;
    const std::vector<double> pi = mlm_pi(spec, eta);
    Matrix D(J, J - 1);
    switch (spec.family) {
        case MlmFamily::Baseline: {
            for (int j = 0; j < J; ++j)
                for (int t = 0; t < J - 1; ++t)
                    D(j, t) = pi[j] * ((j == t ? 1.0 : 0.0) - pi[t]);
            break;
        }
        case MlmFamily::Cumulative: {
            for (int t = 0; t < J - 1; ++t) {
                const double g = logistic(eta[t]);
                const double gp = g * (1.0 - g);
                D(t, t) += gp;
                D(t + 1, t) -= gp;
            }
            break;
        }
        case MlmFamily::Adjacent: {
            std::vector<double> cum(J - 1, 0.0);
            double acc = 0.0;
            for (int t = 0; t < J - 1; ++t) {
                acc += pi[t];
                cum[t] = acc;
            }
            for (int j = 0; j < J; ++j)
                for (int t = 0; t < J - 1; ++t)
                    D(j, t) = pi[j] * ((j <= t ? 1.0 : 0.0) - cum[t]);
            break;
        }
        case MlmFamily::Continuation: {
            for (int j = 0; j < J; ++j) {
                for (int t = 0; t < J - 1; ++t) {
                    const double s = logistic(eta[t]);
                    if (j < J - 1) {
                        if (t == j)
                            D(j, t) = pi[j] * (1.0 - s);
                        else if (t < j)
                            D(j, t) = -pi[j] * s;
                    } else {
                        D(j, t) = -pi[j] * s;
                    }
                }
            }
            break;
        }
    }
    return D;
}

Matrix mlm_model_matrix(const MlmSpec& spec, const DesignPoint& x) {
    const int J = spec.J;
    const std::size_t p = spec.p();
    Matrix X(J, p);
    std::size_t offset = 0;
    for (int j = 0; j < J - 1; ++j) {
        const auto& block = spec.category_predictors[j];
        for (std::size_t i = 0; i < block.size(); ++i)
            X(j, offset + i) = block[i].eval(x.coords);
        offset += block.size();
    }
    for (std::size_t i = 0; i < spec.shared_predictors.size(); ++i) {
        const double v = spec.shared_predictors[i].eval(x.coords);
        for (int j = 0; j < J - 1; ++j) X(j, offset + i) = v;
    }
    return X;  // last row stays zero
}

std::vector<double> mlm_eta(const MlmSpec& spec, const Matrix& model_matrix,
                            const ParamVector& theta) {
    if (theta.p() != spec.p()) throw DimensionMismatch("mlm_eta: theta length != p");
    std::vector<double> eta(spec.J - 1);
    for (int j = 0; j < spec.J - 1; ++j) eta[j] = dot(model_matrix.row(j), theta.theta);
    return eta;
}

Matrix mlm_U_from_eta(const MlmSpec& spec, std::span<const double> eta) {
    const int J = spec.J;
    const std::vector<double> pi = mlm_pi(spec, eta);
    const Matrix D = mlm_dpi_deta(spec, eta);
    Matrix U(J, J);
    for (int s = 0; s < J - 1; ++s) {
        for (int t = s; t < J - 1; ++t) {
            double u = 0.0;
            for (int j = 0; j < J; ++j) u += D(j, s) * D(j, t) / pi[j];
            U(s, t) = u;
            U(t, s) = u;
        }
    }
    return U;  // last row/column zero, matching the zero last row of X
}

Matrix mlm_U(const MlmSpec& spec, const DesignPoint& x, const ParamVector& theta) {
    const Matrix X = mlm_model_matrix(spec, x);
    const std::vector<double> eta = mlm_eta(spec, X, theta);
    return mlm_U_from_eta(spec, eta);
}

Matrix mlm_info(const MlmSpec& spec, const DesignPoint& x, const ParamVector& theta) {
    const Matrix X = mlm_model_matrix(spec, x);
    const std::vector<double> eta = mlm_eta(spec, X, theta);
    const Matrix U = mlm_U_from_eta(spec, eta);
    return X.transposed() * U * X;
}

Matrix point_info(const ModelSpec& model, const DesignPoint& x, const ParamVector& theta) {
    if (const auto* g = std::get_if<GlmSpec>(&model)) return glm_info(*g, x, theta);
    return mlm_info(std::get<MlmSpec>(model), x, theta);
}

Matrix predictor_gradient(const ModelSpec& model, const DesignPoint& x, std::size_t k) {
    const std::size_t p = model_dim(model);
    Matrix G(p, k);
    auto fill = [&](std::size_t row, const Predictor& h) {
        for (std::size_t j = 0; j < k; ++j) G(row, j) = h.partial(x.coords, j);
    };
    if (const auto* g = std::get_if<GlmSpec>(&model)) {
        for (std::size_t i = 0; i < g->p(); ++i) fill(i, g->predictors[i]);
    } else {
        const auto& m = std::get<MlmSpec>(model);
        std::size_t row = 0;
        for (const auto& block : m.category_predictors)
            for (const auto& h : block) fill(row++, h);
        for (const auto& h : m.shared_predictors) fill(row++, h);
    }
    return G;
}

bool feasible_over_region(const ModelSpec& model, const DesignRegion& region,
                          const ParamVector& theta) {
    const auto* m = std::get_if<MlmSpec>(&model);
    if (!m || m->family != MlmFamily::Cumulative) return true;

    // eta_j is affine in coordinatewise-monotone transforms of x, so the
    // ordering holds on the whole box iff it holds at every corner.
    const std::size_t k = region.k();
    const std::size_t corners = std::size_t{1} << std::min<std::size_t>(k, 20);
    std::vector<double> cont(k);
    for (std::size_t ci = 0; ci < region.num_combos(); ++ci) {
        for (std::size_t mask = 0; mask < corners; ++mask) {
            for (std::size_t j = 0; j < k; ++j)
                cont[j] = (mask >> j) & 1 ? region.upper(j) : region.lower(j);
            const DesignPoint x = region.make_point(cont, ci);
            const Matrix X = mlm_model_matrix(*m, x);
            const std::vector<double> eta = mlm_eta(*m, X, theta);
            for (std::size_t j = 0; j + 1 < eta.size(); ++j)
                if (!(eta[j] < eta[j + 1])) return false;
        }
    }
    return true;
}

}  // namespace ewd
