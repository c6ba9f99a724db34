#pragma once

#include <cstddef>

#include "ewd/model.hpp"

namespace ewd::kernels {

// Batched inner loops of the expectation machinery. The scalar table is the
// reference; the AVX2 table is selected at runtime when the CPU supports it
// and must agree with the reference within roundoff (equivalence-tested).
// `theta` batches are stored coordinate-major: coordinate k occupies
// theta[k * batch .. k * batch + batch).
struct KernelTable {
    const char* name;

    // eta[b] = sum_k h[k] * theta[k * batch + b]
    void (*eta_batch)(const double* theta, std::size_t batch, std::size_t p, const double* h,
                      double* eta);

    // Fixed-order pairwise sum divided by n; deterministic per variant.
    double (*mean)(const double* v, std::size_t n);

    double (*dot)(const double* a, const double* b, std::size_t n);

    // out[b] = nu(eta[b]) / nu'(eta[b]) for the given link.
    void (*nu_batch)(Link link, const double* eta, std::size_t n, double* out);
    void (*nu_prime_batch)(Link link, const double* eta, std::size_t n, double* out);
};

const KernelTable& scalar_kernels();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_kernels();

// Process-wide selection: AVX2 when available, overridable with
// EWD_KERNELS=scalar|avx2.
const KernelTable& active_kernels();

}  // namespace ewd::kernels
