#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and, on x86-64, an AVX2/FMA variant; the public entry
// points pick the widest variant the running CPU supports.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "commdist/linalg3.hpp"

namespace commdist::kernels {

enum class Isa { scalar, avx2 };

/// Widest ISA usable on this machine (checked once, cached).
Isa best_isa() noexcept;
bool avx2_available() noexcept;
const char* to_string(Isa isa) noexcept;

/// Structure-of-arrays batch of symmetric matrices: coeff[c][i] is
/// coefficient c (storage order 11, 22, 33, 12, 13, 23) of matrix i.
struct SymBatch {
    std::array<std::vector<double>, 6> coeff;

    SymBatch() = default;
    explicit SymBatch(std::span<const SymMat3> mats);
    std::size_t size() const noexcept { return coeff[0].size(); }
};

double dot(std::span<const double> a, std::span<const double> b, Isa isa = best_isa()) noexcept;
/// y += alpha·x
void axpy(double alpha, std::span<const double> x, std::span<double> y, Isa isa = best_isa()) noexcept;
/// y = A x for row-major A (rows × cols).
void gemv(std::size_t rows, std::size_t cols, std::span<const double> a, std::span<const double> x,
          std::span<double> y, Isa isa = best_isa()) noexcept;
/// out[i] = ‖A_i B_i − B_i A_i‖ (Frobenius).
void commutator_norms(const SymBatch& a, const SymBatch& b, std::span<double> out, Isa isa = best_isa()) noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void commutator_norms(const std::array<const double*, 6>& a, const std::array<const double*, 6>& b, double* out,
                      std::size_t n) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void commutator_norms(const std::array<const double*, 6>& a, const std::array<const double*, 6>& b, double* out,
                      std::size_t n) noexcept;
}  // namespace avx2

}  // namespace commdist::kernels
