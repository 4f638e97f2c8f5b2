#include "commdist/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace commdist::kernels {

#if defined(COMMDIST_HAVE_AVX2)
constexpr bool kCompiledAvx2 = true;
#else
constexpr bool kCompiledAvx2 = false;
#endif

bool avx2_available() noexcept {
    static const bool available = [] {
#if defined(COMMDIST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }();
    return available;
}

Isa best_isa() noexcept { return avx2_available() ? Isa::avx2 : Isa::scalar; }

const char* to_string(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace {

bool use_avx2(Isa isa) noexcept { return kCompiledAvx2 && isa == Isa::avx2 && avx2_available(); }

std::array<const double*, 6> pointers(const SymBatch& b) noexcept {
    return {b.coeff[0].data(), b.coeff[1].data(), b.coeff[2].data(),
            b.coeff[3].data(), b.coeff[4].data(), b.coeff[5].data()};
}

}  // namespace

#if !defined(COMMDIST_HAVE_AVX2)
// Scalar-only builds still link the avx2 symbols; they are never selected.
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept { scalar::axpy(alpha, x, y, n); }
void commutator_norms(const std::array<const double*, 6>& a, const std::array<const double*, 6>& b, double* out,
                      std::size_t n) noexcept {
    scalar::commutator_norms(a, b, out, n);
}
}  // namespace avx2
#endif

SymBatch::SymBatch(std::span<const SymMat3> mats) {
    for (auto& c : coeff) c.resize(mats.size());
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const auto c = mats[i].coefficients();
        for (std::size_t k = 0; k < 6; ++k) coeff[k][i] = c[k];
    }
}

double dot(std::span<const double> a, std::span<const double> b, Isa isa) noexcept {
    const std::size_t n = std::min(a.size(), b.size());
    return use_avx2(isa) ? avx2::dot(a.data(), b.data(), n) : scalar::dot(a.data(), b.data(), n);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y, Isa isa) noexcept {
    const std::size_t n = std::min(x.size(), y.size());
    if (use_avx2(isa))
        avx2::axpy(alpha, x.data(), y.data(), n);
    else
        scalar::axpy(alpha, x.data(), y.data(), n);
}

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a, std::span<const double> x,
          std::span<double> y, Isa isa) noexcept {
    assert(a.size() >= rows * cols && x.size() >= cols && y.size() >= rows);
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a.subspan(r * cols, cols), x.first(cols), isa);
}

void commutator_norms(const SymBatch& a, const SymBatch& b, std::span<double> out, Isa isa) noexcept {
    const std::size_t n = std::min({a.size(), b.size(), out.size()});
    if (use_avx2(isa))
        avx2::commutator_norms(pointers(a), pointers(b), out.data(), n);
    else
        scalar::commutator_norms(pointers(a), pointers(b), out.data(), n);
}

}  // namespace commdist::kernels
