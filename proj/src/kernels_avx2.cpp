// Compiled with -mavx2 -mfma; only called after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "commdist/kernels.hpp"

namespace commdist::kernels::avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void commutator_norms(const std::array<const double*, 6>& a, const std::array<const double*, 6>& b, double* out,
                      std::size_t n) noexcept {
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a11 = _mm256_loadu_pd(a[0] + i), a22 = _mm256_loadu_pd(a[1] + i), a33 = _mm256_loadu_pd(a[2] + i);
        const __m256d a12 = _mm256_loadu_pd(a[3] + i), a13 = _mm256_loadu_pd(a[4] + i), a23 = _mm256_loadu_pd(a[5] + i);
        const __m256d b11 = _mm256_loadu_pd(b[0] + i), b22 = _mm256_loadu_pd(b[1] + i), b33 = _mm256_loadu_pd(b[2] + i);
        const __m256d b12 = _mm256_loadu_pd(b[3] + i), b13 = _mm256_loadu_pd(b[4] + i), b23 = _mm256_loadu_pd(b[5] + i);

        __m256d c12 = _mm256_mul_pd(_mm256_sub_pd(a11, a22), b12);
        c12 = _mm256_fnmadd_pd(a12, _mm256_sub_pd(b11, b22), c12);
        c12 = _mm256_fmadd_pd(a13, b23, c12);
        c12 = _mm256_fnmadd_pd(a23, b13, c12);

        __m256d c13 = _mm256_mul_pd(_mm256_sub_pd(a11, a33), b13);
        c13 = _mm256_fnmadd_pd(a13, _mm256_sub_pd(b11, b33), c13);
        c13 = _mm256_fmadd_pd(a12, b23, c13);
        c13 = _mm256_fnmadd_pd(a23, b12, c13);

        __m256d c23 = _mm256_mul_pd(_mm256_sub_pd(a22, a33), b23);
        c23 = _mm256_fnmadd_pd(a23, _mm256_sub_pd(b22, b33), c23);
        c23 = _mm256_fmadd_pd(a12, b13, c23);
        c23 = _mm256_fnmadd_pd(a13, b12, c23);

        __m256d s = _mm256_mul_pd(c12, c12);
        s = _mm256_fmadd_pd(c13, c13, s);
        s = _mm256_fmadd_pd(c23, c23, s);
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_mul_pd(two, s)));
    }
    if (i < n) {
        const std::array<const double*, 6> ta{a[0] + i, a[1] + i, a[2] + i, a[3] + i, a[4] + i, a[5] + i};
        const std::array<const double*, 6> tb{b[0] + i, b[1] + i, b[2] + i, b[3] + i, b[4] + i, b[5] + i};
        scalar::commutator_norms(ta, tb, out + i, n - i);
    }
}

}  // namespace commdist::kernels::avx2
