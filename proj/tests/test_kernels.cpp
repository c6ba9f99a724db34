#include <doctest.h>

#include <cmath>
#include <vector>

#include "ewd/kernels.hpp"
#include "ewd/rng.hpp"

using namespace ewd;
using kernels::KernelTable;

namespace {

struct Batch {
    std::vector<double> theta;  // coordinate-major p x B
    std::vector<double> h;
    std::size_t B;
    std::size_t p;
};

Batch random_batch(std::size_t B, std::size_t p, Rng& rng) {
    Batch b;
    b.B = B;
    b.p = p;
    b.theta.resize(B * p);
    b.h.resize(p);
    for (double& v : b.theta) v = rng.uniform(-2.0, 2.0);
    for (double& v : b.h) v = rng.uniform(-1.5, 1.5);
    return b;
}

}  // namespace

TEST_CASE("scalar eta_batch equals per-draw dot products") {
    Rng rng(101);
    const Batch b = random_batch(37, 5, rng);
    std::vector<double> eta(b.B);
    kernels::scalar_kernels().eta_batch(b.theta.data(), b.B, b.p, b.h.data(), eta.data());
    for (std::size_t i = 0; i < b.B; ++i) {
        double expect = 0.0;
        for (std::size_t k = 0; k < b.p; ++k) expect += b.h[k] * b.theta[k * b.B + i];
        CHECK(eta[i] == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("scalar mean is exact on simple sums") {
    Rng rng(102);
    std::vector<double> v(1001);
    double s = 0.0;
    for (double& x : v) {
        x = rng.uniform(-1.0, 1.0);
        s += x;
    }
    CHECK(kernels::scalar_kernels().mean(v.data(), v.size()) ==
          doctest::Approx(s / static_cast<double>(v.size())).epsilon(1e-13));
}

TEST_CASE("nu_batch agrees with glm_nu elementwise") {
    Rng rng(103);
    std::vector<double> eta(129);
    for (double& e : eta) e = rng.uniform(-38.0, 38.0);  // spans the guard
    std::vector<double> out(eta.size());
    for (Link link : {Link::Logit, Link::Probit, Link::Cloglog, Link::Loglog}) {
        kernels::scalar_kernels().nu_batch(link, eta.data(), eta.size(), out.data());
        for (std::size_t i = 0; i < eta.size(); ++i)
            CHECK(out[i] == doctest::Approx(glm_nu(link, eta[i])).epsilon(1e-15));
    }
}

TEST_CASE("avx2 variants agree with the scalar reference") {
    const KernelTable* avx2 = kernels::avx2_kernels();
    if (!avx2) return;  // platform without AVX2: dispatch covers this
    const KernelTable& ref = kernels::scalar_kernels();
    Rng rng(104);

    for (std::size_t B : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{17},
                          std::size_t{256}, std::size_t{1003}}) {
        const Batch b = random_batch(B, 7, rng);
        std::vector<double> eta_s(B), eta_v(B);
        ref.eta_batch(b.theta.data(), B, b.p, b.h.data(), eta_s.data());
        avx2->eta_batch(b.theta.data(), B, b.p, b.h.data(), eta_v.data());
        for (std::size_t i = 0; i < B; ++i)
            CHECK(eta_v[i] == doctest::Approx(eta_s[i]).epsilon(1e-13));

        CHECK(avx2->mean(eta_s.data(), B) ==
              doctest::Approx(ref.mean(eta_s.data(), B)).epsilon(1e-12));
        CHECK(avx2->dot(eta_s.data(), eta_v.data(), B) ==
              doctest::Approx(ref.dot(eta_s.data(), eta_v.data(), B)).epsilon(1e-12));

        std::vector<double> nu_s(B), nu_v(B), np_s(B), np_v(B);
        for (Link link : {Link::Logit, Link::Probit}) {
            ref.nu_batch(link, eta_s.data(), B, nu_s.data());
            avx2->nu_batch(link, eta_s.data(), B, nu_v.data());
            ref.nu_prime_batch(link, eta_s.data(), B, np_s.data());
            avx2->nu_prime_batch(link, eta_s.data(), B, np_v.data());
            for (std::size_t i = 0; i < B; ++i) {
                CHECK(nu_v[i] == doctest::Approx(nu_s[i]).epsilon(1e-12));
                CHECK(np_v[i] == doctest::Approx(np_s[i]).epsilon(1e-12).scale(1e-3));
            }
        }
    }
}

TEST_CASE("avx2 logit handles the eta guard boundary") {
    const KernelTable* avx2 = kernels::avx2_kernels();
    if (!avx2) return;
    const std::vector<double> eta{-50.0, -35.01, -34.99, 0.0, 34.99, 35.01, 50.0};
    std::vector<double> out(eta.size());
    avx2->nu_batch(Link::Logit, eta.data(), eta.size(), out.data());
    for (std::size_t i = 0; i < eta.size(); ++i)
        CHECK(out[i] == doctest::Approx(glm_nu(Link::Logit, eta[i])).epsilon(1e-12));
    CHECK(out[0] == 0.0);
    CHECK(out.back() == 0.0);
}

TEST_CASE("active dispatch picks a usable table") {
    const KernelTable& t = kernels::active_kernels();
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(t.mean(v.data(), v.size()) == doctest::Approx(2.5));
}
