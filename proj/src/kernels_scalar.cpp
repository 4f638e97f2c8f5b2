#include <cmath>

#include "commdist/kernels.hpp"

namespace commdist::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// For symmetric A, B the commutator is skew with
//   c12 = (a11 − a22) b12 − a12 (b11 − b22) + a13 b23 − a23 b13
//   c13 = (a11 − a33) b13 − a13 (b11 − b33) + a12 b23 − a23 b12
//   c23 = (a22 − a33) b23 − a23 (b22 − b33) + a12 b13 − a13 b12
// and ‖C‖² = 2 (c12² + c13² + c23²).
void commutator_norms(const std::array<const double*, 6>& a, const std::array<const double*, 6>& b, double* out,
                      std::size_t n) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        const double a11 = a[0][i], a22 = a[1][i], a33 = a[2][i], a12 = a[3][i], a13 = a[4][i], a23 = a[5][i];
        const double b11 = b[0][i], b22 = b[1][i], b33 = b[2][i], b12 = b[3][i], b13 = b[4][i], b23 = b[5][i];
        const double c12 = (a11 - a22) * b12 - a12 * (b11 - b22) + a13 * b23 - a23 * b13;
        const double c13 = (a11 - a33) * b13 - a13 * (b11 - b33) + a12 * b23 - a23 * b12;
        const double c23 = (a22 - a33) * b23 - a23 * (b22 - b33) + a12 * b13 - a13 * b12;
        out[i] = std::sqrt(2.0 * (c12 * c12 + c13 * c13 + c23 * c23));
    }
}

}  // namespace commdist::kernels::scalar
