#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewd/errors.hpp"
#include "ewd/model.hpp"
#include "ewd/rng.hpp"
#include "ewd/terms.hpp"
#include "oracles.hpp"

using namespace ewd;

namespace {

// nu rebuilt from its definition ((g^{-1})')^2 / Var by finite differences.
double nu_from_definition(Link link, double eta) {
    auto mu = [&](double e) { return oracles::glm_mu(link, e); };
    const double dmu = oracles::central_diff(mu, eta);
    const double m = mu(eta);
    return dmu * dmu / (m * (1.0 - m));
}

GlmSpec three_factor_glm(Link link) {
    GlmSpec g;
    g.link = link;
    g.predictors = {parse_predictor("1"), parse_predictor("x1"), parse_predictor("x2")};
    return g;
}

MlmSpec small_mlm(MlmFamily family, int J) {
    MlmSpec m;
    m.family = family;
    m.J = J;
    for (int j = 0; j < J - 1; ++j)
        m.category_predictors.push_back({parse_predictor("1"), parse_predictor("x1")});
    m.shared_predictors = {parse_predictor("x2")};
    return m;
}

std::vector<double> feasible_eta(MlmFamily family, int J, Rng& rng) {
    std::vector<double> eta(static_cast<std::size_t>(J - 1));
    for (double& e : eta) e = rng.uniform(-1.5, 1.5);
    if (family == MlmFamily::Cumulative) {
        std::sort(eta.begin(), eta.end());
        for (std::size_t j = 1; j < eta.size(); ++j)
            eta[j] = std::max(eta[j], eta[j - 1] + 0.1);
    }
    return eta;
}

const MlmFamily kFamilies[] = {MlmFamily::Baseline, MlmFamily::Cumulative, MlmFamily::Adjacent,
                               MlmFamily::Continuation};

}  // namespace

TEST_CASE("glm_nu closed-form values") {
    CHECK(glm_nu(Link::Logit, 0.0) == doctest::Approx(0.25));
    CHECK(glm_nu(Link::Probit, 0.0) == doctest::Approx(2.0 / std::numbers::pi));
    CHECK(glm_nu(Link::Identity, 3.0) == 1.0);
}

TEST_CASE("glm_nu matches its defining ratio by finite differences") {
    for (Link link : {Link::Logit, Link::Probit, Link::Cloglog, Link::Loglog}) {
        for (double eta : {-2.0, -0.7, 0.0, 0.4, 1.3, 3.0}) {
            CHECK(glm_nu(link, eta) ==
                  doctest::Approx(nu_from_definition(link, eta)).epsilon(1e-8));
        }
    }
}

TEST_CASE("glm_nu overflow guard returns the tail limit") {
    for (Link link : {Link::Logit, Link::Probit, Link::Cloglog, Link::Loglog}) {
        CHECK(glm_nu(link, 40.0) == 0.0);
        CHECK(glm_nu(link, -40.0) == 0.0);
        CHECK(glm_nu_prime(link, 40.0) == 0.0);
        CHECK(std::isfinite(glm_nu(link, 34.9)));
    }
}

TEST_CASE("glm_nu_prime symmetry zeros and central differences") {
    CHECK(glm_nu_prime(Link::Logit, 0.0) == doctest::Approx(0.0));
    CHECK(glm_nu_prime(Link::Probit, 0.0) == doctest::Approx(0.0));
    for (Link link : {Link::Logit, Link::Probit, Link::Cloglog, Link::Loglog}) {
        for (double eta : {-2.0, -1.0, 0.5, 1.0, 2.5}) {
            auto f = [&](double e) { return glm_nu(link, e); };
            CHECK(glm_nu_prime(link, eta) ==
                  doctest::Approx(oracles::central_diff(f, eta)).epsilon(1e-6));
        }
    }
}

TEST_CASE("glm_info rank-1 structure") {
    GlmSpec g;
    g.link = Link::Logit;
    g.predictors = {parse_predictor("1"), parse_predictor("x1")};
    const DesignPoint x{{0.0}};
    const ParamVector theta{{0.0, 1.0}};
    const Matrix F = glm_info(g, x, theta);
    // eta = 0, h = (1, 0): only the (1,1) entry carries nu = 1/4
    CHECK(F(0, 0) == doctest::Approx(0.25));
    CHECK(F(0, 1) == doctest::Approx(0.0));
    CHECK(F(1, 1) == doctest::Approx(0.0));

    const DesignPoint x2{{0.7}};
    const Matrix F2 = glm_info(g, x2, theta);
    const std::vector<double> h{1.0, 0.7};
    CHECK(trace(F2) == doctest::Approx(glm_nu(Link::Logit, 0.7) * dot(h, h)));
    const std::vector<double> ev = symmetric_eigenvalues(F2);
    CHECK(ev.back() > 0.0);
    CHECK(std::fabs(ev.front()) < 1e-12 * ev.back());  // rank exactly 1
}

TEST_CASE("glm_info matches enumerated Bernoulli information") {
    Rng rng(71);
    for (Link link : {Link::Logit, Link::Probit, Link::Cloglog, Link::Loglog}) {
        const GlmSpec g = three_factor_glm(link);
        for (int rep = 0; rep < 25; ++rep) {
            const DesignPoint x{{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
            const ParamVector theta{{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                                     rng.uniform(-0.8, 0.8)}};
            const Matrix F = glm_info(g, x, theta);
            const Matrix ref = oracles::glm_info_enumerated(g, x, theta, 1e-4);
            for (std::size_t r = 0; r < 3; ++r)
                for (std::size_t c = 0; c < 3; ++c)
                    CHECK(F(r, c) == doctest::Approx(ref(r, c)).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("mlm_pi closed forms") {
    MlmSpec baseline = small_mlm(MlmFamily::Baseline, 4);
    const std::vector<double> uniform_eta{0.0, 0.0, 0.0};
    for (double pi : mlm_pi(baseline, uniform_eta)) CHECK(pi == doctest::Approx(0.25));

    MlmSpec cumulative = small_mlm(MlmFamily::Cumulative, 3);
    const std::vector<double> eta{-1.0, 1.0};
    const std::vector<double> pi = mlm_pi(cumulative, eta);
    const double s1 = 1.0 / (1.0 + std::exp(1.0));
    const double s2 = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(pi[0] == doctest::Approx(s1));          // 0.26894
    CHECK(pi[1] == doctest::Approx(s2 - s1));     // 0.46212
    CHECK(pi[2] == doctest::Approx(1.0 - s2));    // 0.26894
    CHECK(pi[0] == doctest::Approx(0.26894).epsilon(1e-4));
    CHECK(pi[1] == doctest::Approx(0.46212).epsilon(1e-4));
}

TEST_CASE("mlm_pi solves the implicit constraint-matrix equations") {
    Rng rng(72);
    for (MlmFamily family : kFamilies) {
        for (int J : {3, 4, 5}) {
            const MlmSpec spec = small_mlm(family, J);
            for (int rep = 0; rep < 10; ++rep) {
                const std::vector<double> eta = feasible_eta(family, J, rng);
                const std::vector<double> pi = mlm_pi(spec, eta);
                const std::vector<double> ref = oracles::mlm_pi_implicit(spec, eta);
                double sum = 0.0;
                for (int j = 0; j < J; ++j) {
                    CHECK(pi[static_cast<std::size_t>(j)] ==
                          doctest::Approx(ref[static_cast<std::size_t>(j)]).epsilon(1e-9));
                    sum += pi[static_cast<std::size_t>(j)];
                    CHECK(pi[static_cast<std::size_t>(j)] > 0.0);
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("cumulative ordering violation raises InfeasibleParameters") {
    const MlmSpec spec = small_mlm(MlmFamily::Cumulative, 3);
    CHECK_THROWS_AS(mlm_pi(spec, std::vector<double>{1.0, -1.0}), InfeasibleParameters);
}

TEST_CASE("mlm_model_matrix block layout") {
    // npo with h_j = (1, x1), no shared block, J = 3
    MlmSpec npo;
    npo.family = MlmFamily::Baseline;
    npo.J = 3;
    npo.category_predictors = {{parse_predictor("1"), parse_predictor("x1")},
                               {parse_predictor("1"), parse_predictor("x1")}};
    const DesignPoint x{{2.0}};
    const Matrix X = mlm_model_matrix(npo, x);
    CHECK(X.rows() == 3);
    CHECK(X.cols() == 4);
    const double expected[3][4] = {{1, 2, 0, 0}, {0, 0, 1, 2}, {0, 0, 0, 0}};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c) CHECK(X(r, c) == doctest::Approx(expected[r][c]));

    // po with h_j = (1), h_c = (x1)
    MlmSpec po;
    po.family = MlmFamily::Cumulative;
    po.J = 3;
    po.category_predictors = {{parse_predictor("1")}, {parse_predictor("1")}};
    po.shared_predictors = {parse_predictor("x1")};
    const Matrix Xp = mlm_model_matrix(po, x);
    const double expected_po[3][3] = {{1, 0, 2}, {0, 1, 2}, {0, 0, 0}};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) CHECK(Xp(r, c) == doctest::Approx(expected_po[r][c]));
    CHECK(po.p() == po.pj(0) + po.pj(1) + po.pc());
}

TEST_CASE("mlm_U matches the numeric information in eta") {
    Rng rng(73);
    for (MlmFamily family : kFamilies) {
        const int J = 3;
        const MlmSpec spec = small_mlm(family, J);
        for (int rep = 0; rep < 10; ++rep) {
            const std::vector<double> eta = feasible_eta(family, J, rng);
            const Matrix U = mlm_U_from_eta(spec, eta);
            CHECK(is_symmetric(U, 1e-10));
            // last row/column must be zero to match the zero row of X
            for (int j = 0; j < J; ++j) {
                CHECK(U(static_cast<std::size_t>(J - 1), static_cast<std::size_t>(j)) == 0.0);
                CHECK(U(static_cast<std::size_t>(j), static_cast<std::size_t>(J - 1)) == 0.0);
            }
            // numeric E[s s^T] in eta: sum_j pi_j grad log pi_j outer itself
            const std::vector<double> pi0 = mlm_pi(spec, eta);
            Matrix ref(static_cast<std::size_t>(J - 1), static_cast<std::size_t>(J - 1));
            const double h = 1e-6;
            for (int j = 0; j < J; ++j) {
                std::vector<double> score(static_cast<std::size_t>(J - 1));
                for (int t = 0; t < J - 1; ++t) {
                    std::vector<double> ep(eta.begin(), eta.end()), em(eta.begin(), eta.end());
                    ep[static_cast<std::size_t>(t)] += h;
                    em[static_cast<std::size_t>(t)] -= h;
                    score[static_cast<std::size_t>(t)] =
                        (std::log(mlm_pi(spec, ep)[static_cast<std::size_t>(j)]) -
                         std::log(mlm_pi(spec, em)[static_cast<std::size_t>(j)])) /
                        (2.0 * h);
                }
                ref.add_scaled(outer_scaled(score, 1.0), pi0[static_cast<std::size_t>(j)]);
            }
            for (int s = 0; s < J - 1; ++s)
                for (int t = 0; t < J - 1; ++t)
                    CHECK(U(static_cast<std::size_t>(s), static_cast<std::size_t>(t)) ==
                          doctest::Approx(ref(static_cast<std::size_t>(s),
                                              static_cast<std::size_t>(t)))
                              .epsilon(1e-6)
                              .scale(1.0));
        }
    }
}

TEST_CASE("mlm_info matches enumerated score outer products, all families") {
    Rng rng(74);
    for (MlmFamily family : kFamilies) {
        const MlmSpec spec = small_mlm(family, 3);
        const std::size_t p = spec.p();
        for (int rep = 0; rep < 25; ++rep) {
            const DesignPoint x{{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
            ParamVector theta;
            theta.theta.resize(p);
            for (double& v : theta.theta) v = rng.uniform(-0.6, 0.6);
            if (family == MlmFamily::Cumulative) {
                // order the two intercepts so that eta_1 < eta_2 over |x| <= 1
                theta.theta[0] = -1.5 + 0.3 * theta.theta[0];
                theta.theta[2] = 1.5 + 0.3 * theta.theta[2];
                theta.theta[3] = theta.theta[1];  // common slope keeps the gap
            }
            const Matrix F = mlm_info(spec, x, theta);
            CHECK(is_symmetric(F, 1e-12));
            CHECK(is_psd(F, 1e-9));
            const Matrix ref = oracles::mlm_info_enumerated(spec, x, theta);
            for (std::size_t r = 0; r < p; ++r)
                for (std::size_t c = 0; c < p; ++c)
                    CHECK(F(r, c) == doctest::Approx(ref(r, c)).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("mlm_info rank bound with constant predictors") {
    MlmSpec spec;
    spec.family = MlmFamily::Baseline;
    spec.J = 3;
    spec.category_predictors = {{parse_predictor("1")}, {parse_predictor("1")}};
    const DesignPoint x{{0.3}};
    const ParamVector theta{{0.2, -0.4}};
    const Matrix F = mlm_info(spec, x, theta);
    const std::vector<double> ev = symmetric_eigenvalues(F);
    int positive = 0;
    for (double v : ev)
        if (v > 1e-12) ++positive;
    CHECK(positive <= spec.J - 1);
}

TEST_CASE("predictor_gradient shapes and values") {
    GlmSpec g;
    g.link = Link::Logit;
    g.predictors = {parse_predictor("1"), parse_predictor("x1"), parse_predictor("x2"),
                    parse_predictor("x1*x2")};
    const DesignPoint x{{2.0, 3.0}};
    const Matrix G = predictor_gradient(g, x, 2);
    CHECK(G.rows() == 4);
    CHECK(G.cols() == 2);
    const double col0[] = {0, 1, 0, 3};
    const double col1[] = {0, 0, 1, 2};
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(G(r, 0) == doctest::Approx(col0[r]));
        CHECK(G(r, 1) == doctest::Approx(col1[r]));
    }

    GlmSpec constant;
    constant.link = Link::Logit;
    constant.predictors = {parse_predictor("1"), parse_predictor("2")};
    const Matrix Gz = predictor_gradient(constant, x, 2);
    CHECK(max_abs(Gz) == 0.0);
}

TEST_CASE("feasible_over_region for cumulative models") {
    MlmSpec spec = small_mlm(MlmFamily::Cumulative, 3);
    const DesignRegion region({{-1.0, 1.0}, {-1.0, 1.0}}, {});
    // common slopes, ordered intercepts: always feasible
    CHECK(feasible_over_region(spec, region, ParamVector{{-1.0, 0.5, 1.0, 0.5, 0.2}}));
    // slopes that cross inside the box
    CHECK_FALSE(feasible_over_region(spec, region, ParamVector{{-0.1, 2.0, 0.1, -2.0, 0.0}}));
}
