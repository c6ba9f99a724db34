#include <cstring>

#include "ewd/kernels.hpp"

namespace ewd::kernels {
namespace {

void eta_batch_scalar(const double* theta, std::size_t batch, std::size_t p, const double* h,
                      double* eta) {
    std::memset(eta, 0, batch * sizeof(double));
    for (std::size_t k = 0; k < p; ++k) {
        const double hk = h[k];
        if (hk == 0.0) continue;
        const double* col = theta + k * batch;
        for (std::size_t b = 0; b < batch; ++b) eta[b] += hk * col[b];
    }
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double mean_scalar(const double* v, std::size_t n) {
    return n ? pairwise_sum(v, n) / static_cast<double>(n) : 0.0;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void nu_batch_scalar(Link link, const double* eta, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = glm_nu(link, eta[i]);
}

void nu_prime_batch_scalar(Link link, const double* eta, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = glm_nu_prime(link, eta[i]);
}

constexpr KernelTable kScalarTable{
    "scalar", eta_batch_scalar, mean_scalar, dot_scalar, nu_batch_scalar, nu_prime_batch_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

}  // namespace ewd::kernels
