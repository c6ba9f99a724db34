#include "ewd/expectation.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "ewd/errors.hpp"
#include "ewd/kernels.hpp"
#include "ewd/rng.hpp"

namespace ewd {

ParameterEnsemble ParameterEnsemble::from_samples(std::vector<ParamVector> thetas) {
    if (thetas.empty()) throw ValidationError("parameter sample must contain at least one theta");
    const std::size_t p = thetas.front().p();
    for (const auto& t : thetas) {
        if (t.p() != p) throw ValidationError("parameter sample rows have inconsistent length");
        for (double v : t.theta)
            if (!std::isfinite(v)) throw ValidationError("parameter sample contains non-finite value");
    }
    ParameterEnsemble e;
    e.samples_ = std::move(thetas);
    return e;
}

ParameterEnsemble ParameterEnsemble::from_prior(PriorSpec spec) {
    if (spec.coords.empty()) throw ValidationError("prior needs at least one coordinate");
    if (spec.mc_size < 1) throw ValidationError("mc_size must be >= 1");
    for (const auto& c : spec.coords) {
        if (c.kind == PriorCoordinate::Kind::Uniform && !(c.a < c.b))
            throw ValidationError("uniform prior requires a < b");
        if (c.kind == PriorCoordinate::Kind::Normal && !(c.b > 0.0))
            throw ValidationError("normal prior requires sigma > 0");
    }
    ParameterEnsemble e;
    e.prior_ = std::move(spec);
    return e;
}

std::vector<ParamVector> ParameterEnsemble::materialize(const ModelSpec& model,
                                                        const DesignRegion& region) const {
    const std::size_t p = model_dim(model);
    if (!prior_) {
        if (samples_.front().p() != p)
            throw ValidationError("parameter sample length does not match model dimension");
        return samples_;
    }
    const PriorSpec& spec = *prior_;
    if (spec.coords.size() != p)
        throw ValidationError("prior coordinate count does not match model dimension");

    Rng rng(spec.seed);
    std::vector<ParamVector> draws;
    draws.reserve(spec.mc_size);
    std::size_t rejections = 0;
    const std::size_t max_rejections = spec.mc_size * 10;
    while (draws.size() < spec.mc_size) {
        ParamVector theta;
        theta.theta.resize(p);
        for (std::size_t i = 0; i < p; ++i) {
            const PriorCoordinate& c = spec.coords[i];
            theta.theta[i] = c.kind == PriorCoordinate::Kind::Uniform ? rng.uniform(c.a, c.b)
                                                                      : rng.normal(c.a, c.b);
        }
        if (spec.feasibility_filter && !feasible_over_region(model, region, theta)) {
            if (++rejections > max_rejections)
                throw AllDrawsInfeasible("rejected " + std::to_string(rejections) +
                                         " prior draws; feasible region too small");
            continue;
        }
        draws.push_back(std::move(theta));
    }
    return draws;
}

ExpectationContext::ExpectationContext(ModelSpec model, DesignRegion region,
                                       const ParameterEnsemble& ensemble)
    : model_(std::move(model)), region_(std::move(region)) {
    // Sample-based draws are not feasibility-filtered: an infeasible user
    // sample should fail loudly at probability evaluation, not be dropped.
    draws_ = ensemble.materialize(model_, region_);
    p_ = model_dim(model_);
    const std::size_t B = draws_.size();
    theta_colmajor_.resize(p_ * B);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t k = 0; k < p_; ++k) theta_colmajor_[k * B + b] = draws_[b].theta[k];
}

double ExpectationContext::glm_nu_mean(std::span<const double> h) const {
    const auto& g = std::get<GlmSpec>(model_);
    const auto& K = kernels::active_kernels();
    const std::size_t B = draws_.size();
    std::vector<double> eta(B), nu(B);
    K.eta_batch(theta_colmajor_.data(), B, p_, h.data(), eta.data());
    K.nu_batch(g.link, eta.data(), B, nu.data());
    return K.mean(nu.data(), B);
}

std::vector<double> ExpectationContext::glm_nu_prime_mean_theta(std::span<const double> h) const {
    const auto& g = std::get<GlmSpec>(model_);
    const auto& K = kernels::active_kernels();
    const std::size_t B = draws_.size();
    std::vector<double> eta(B), np(B);
    K.eta_batch(theta_colmajor_.data(), B, p_, h.data(), eta.data());
    K.nu_prime_batch(g.link, eta.data(), B, np.data());
    std::vector<double> out(p_);
    const double invB = 1.0 / static_cast<double>(B);
    for (std::size_t k = 0; k < p_; ++k)
        out[k] = K.dot(np.data(), theta_colmajor_.data() + k * B, B) * invB;
    return out;
}

Matrix ExpectationContext::mlm_mean_U(const DesignPoint& x) const {
    const auto& m = std::get<MlmSpec>(model_);
    const Matrix X = mlm_model_matrix(m, x);
    Matrix U(m.J, m.J);
    for (const ParamVector& theta : draws_) {
        const std::vector<double> eta = mlm_eta(m, X, theta);
        U += mlm_U_from_eta(m, eta);
    }
    U *= 1.0 / static_cast<double>(draws_.size());
    return U;
}

Matrix ExpectationContext::expected_point_info_uncached(const DesignPoint& x) const {
    if (const auto* g = std::get_if<GlmSpec>(&model_)) {
        const std::vector<double> h = glm_h(*g, x);
        return outer_scaled(h, glm_nu_mean(h));
    }
    const auto& m = std::get<MlmSpec>(model_);
    const Matrix X = mlm_model_matrix(m, x);
    return X.transposed() * mlm_mean_U(x) * X;
}

Matrix ExpectationContext::expected_point_info(const DesignPoint& x) const {
    {
        std::shared_lock lock(cache_mutex_);
        auto it = cache_.find(x.coords);
        if (it != cache_.end()) return it->second;
    }
    Matrix info = expected_point_info_uncached(x);
    {
        std::unique_lock lock(cache_mutex_);
        cache_.emplace(x.coords, info);
    }
    return info;
}

Matrix ExpectationContext::design_info(const ApproximateDesign& xi) const {
    Matrix F(p_, p_);
    for (std::size_t i = 0; i < xi.size(); ++i)
        F.add_scaled(expected_point_info(xi.points[i]), xi.weights[i]);
    return F;
}

Matrix ExpectationContext::design_info_matrix_form(const ApproximateDesign& xi) const {
    const auto* g = std::get_if<GlmSpec>(&model_);
    if (!g) throw ValidationError("matrix-form design info is defined for GLMs only");
    const std::size_t m = xi.size();
    Matrix X(m, p_);
    std::vector<double> wnu(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<double> h = glm_h(*g, xi.points[i]);
        for (std::size_t c = 0; c < p_; ++c) X(i, c) = h[c];
        wnu[i] = xi.weights[i] * glm_nu_mean(h);
    }
    Matrix F(p_, p_);
    for (std::size_t i = 0; i < m; ++i) F.add_scaled(outer_scaled(X.row(i), 1.0), wnu[i]);
    return F;
}

double ExpectationContext::ew_objective(const ApproximateDesign& xi) const {
    return det(design_info(xi));
}

double ExpectationContext::log_ew_objective(const ApproximateDesign& xi) const {
    return log_det(design_info(xi));
}

void ExpectationContext::clear_cache() const {
    std::unique_lock lock(cache_mutex_);
    cache_.clear();
}

std::vector<ParamVector> read_theta_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open parameter file: " + path);
    std::vector<ParamVector> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string cleaned = line;
        for (char& ch : cleaned)
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        std::istringstream ss(cleaned);
        std::vector<double> row;
        std::string tok;
        bool numeric = true;
        while (ss >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) numeric = false;
            } catch (...) {
                numeric = false;
            }
            if (!numeric) break;
        }
        if (row.empty()) continue;
        if (!numeric) {
            if (lineno == 1 && out.empty()) continue;  // header
            throw ParseError("non-numeric value in parameter file " + path, lineno, 1);
        }
        out.push_back(ParamVector{std::move(row)});
    }
    if (out.empty()) throw ValidationError("parameter file has no rows: " + path);
    return out;
}

}  // namespace ewd
