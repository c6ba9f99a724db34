// AVX2 + FMA variants of the batched kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; callers reach it through the runtime
// dispatch in kernels.cpp.

#include "ewd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace ewd::kernels {
namespace {

void eta_batch_avx2(const double* theta, std::size_t batch, std::size_t p, const double* h,
                    double* eta) {
    std::memset(eta, 0, batch * sizeof(double));
    for (std::size_t k = 0; k < p; ++k) {
        const double hk = h[k];
        if (hk == 0.0) continue;
        const double* col = theta + k * batch;
        const __m256d vh = _mm256_set1_pd(hk);
        std::size_t b = 0;
        for (; b + 4 <= batch; b += 4) {
            __m256d acc = _mm256_loadu_pd(eta + b);
            acc = _mm256_fmadd_pd(vh, _mm256_loadu_pd(col + b), acc);
            _mm256_storeu_pd(eta + b, acc);
        }
        for (; b < batch; ++b) eta[b] += hk * col[b];
    }
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double mean_avx2(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(v + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(v + i + 4));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += v[i];
    return s / static_cast<double>(n);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

// exp for 4 doubles: standard range reduction x = n ln2 + r, Taylor on r.
// Inputs are pre-clamped to |x| <= ~40 by the callers, far from any overflow.
__m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d nf = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                       _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(nf, ln2_hi, x);
    r = _mm256_fnmadd_pd(nf, ln2_lo, r);

    // 1 + r + r^2/2! + ... + r^13/13!
    __m256d poly = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
    const double inv_fact[] = {1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
                               1.0 / 362880.0,    1.0 / 40320.0,    1.0 / 5040.0,
                               1.0 / 720.0,       1.0 / 120.0,      1.0 / 24.0,
                               1.0 / 6.0,         1.0 / 2.0,        1.0,
                               1.0};
    for (double c : inv_fact) poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(c));

    // scale by 2^n through the exponent bits
    const __m128i n32 = _mm256_cvtpd_epi32(nf);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(poly, _mm256_castsi256_pd(bits));
}

// Logit weight nu = t / (1+t)^2 with t = exp(-|eta|); symmetric in eta.
__m256d logit_nu(__m256d eta, __m256d& sigma) {
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d aeta = _mm256_and_pd(eta, absmask);
    const __m256d t = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), aeta));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d inv1pt = _mm256_div_pd(one, _mm256_add_pd(one, t));
    // sigma = 1/(1+t) for eta >= 0, t/(1+t) otherwise
    const __m256d neg = _mm256_cmp_pd(eta, _mm256_setzero_pd(), _CMP_LT_OQ);
    sigma = _mm256_blendv_pd(inv1pt, _mm256_mul_pd(t, inv1pt), neg);
    return _mm256_mul_pd(_mm256_mul_pd(t, inv1pt), inv1pt);
}

__m256d guard_mask(__m256d eta) {
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_cmp_pd(_mm256_and_pd(eta, absmask), _mm256_set1_pd(kEtaGuard), _CMP_LE_OQ);
}

void nu_batch_avx2(Link link, const double* eta, std::size_t n, double* out) {
    if (link != Link::Logit) {
        for (std::size_t i = 0; i < n; ++i) out[i] = glm_nu(link, eta[i]);
        return;
    }
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d e = _mm256_loadu_pd(eta + i);
        __m256d sigma;
        const __m256d nu = _mm256_and_pd(logit_nu(e, sigma), guard_mask(e));
        _mm256_storeu_pd(out + i, nu);
    }
    for (; i < n; ++i) out[i] = glm_nu(link, eta[i]);
}

void nu_prime_batch_avx2(Link link, const double* eta, std::size_t n, double* out) {
    if (link != Link::Logit) {
        for (std::size_t i = 0; i < n; ++i) out[i] = glm_nu_prime(link, eta[i]);
        return;
    }
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d e = _mm256_loadu_pd(eta + i);
        __m256d sigma;
        const __m256d nu = logit_nu(e, sigma);
        const __m256d np = _mm256_mul_pd(nu, _mm256_fnmadd_pd(two, sigma, one));
        _mm256_storeu_pd(out + i, _mm256_and_pd(np, guard_mask(e)));
    }
    for (; i < n; ++i) out[i] = glm_nu_prime(link, eta[i]);
}

constexpr KernelTable kAvx2Table{
    "avx2", eta_batch_avx2, mean_avx2, dot_avx2, nu_batch_avx2, nu_prime_batch_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() {
    return (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) ? &kAvx2Table
                                                                             : nullptr;
}

}  // namespace ewd::kernels

#else

namespace ewd::kernels {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace ewd::kernels

#endif
