#pragma once

// Eigenvalue-only measures of how far two symmetric matrices are from
// commuting: the commutator semi-metric d_C, the Hoffman–Wielandt based
// d_E±, the diagonal normalizers M and N, and the angle estimates derived
// from them. None of these need eigenvectors.

#include <array>

#include "commdist/linalg3.hpp"
#include "commdist/so3.hpp"

namespace commdist {

/// ‖AB − BA‖.
double d_commutator(const SymMat3& a, const SymMat3& b) noexcept;

struct HoffmanWielandtGap {
    double min_gap = 0;  ///< min over σ ∈ S₃ of Σ |λi(A) − λσ(i)(B)|²
    double max_gap = 0;
};

HoffmanWielandtGap hoffman_wielandt_gap(const Vec3& lambda_a, const Vec3& lambda_b) noexcept;
HoffmanWielandtGap hoffman_wielandt_gap(const SymMat3& a, const SymMat3& b);

struct DEResult {
    double d_plus = 0;   ///< max_σ (‖A−B‖² − Σσ)
    double d_minus = 0;  ///< min_σ (−‖A−B‖² + Σσ)
    /// Residual of ‖A−B‖² against the permutation sums closest to zero,
    /// min_σ |‖A−B‖² − Σσ|. This is what the angle estimate normalizes.
    double semi = 0;
};

DEResult d_E_pm(const SymMat3& a, const SymMat3& b);
DEResult d_E_pm(const SymMat3& a, const SymMat3& b, const Vec3& lambda_a, const Vec3& lambda_b) noexcept;

/// Diagonal of M(A,B) from descending eigenvalues; every entry ≤ 0.
Vec3 m_matrix(const Vec3& lambda_a, const Vec3& lambda_b) noexcept;
/// Diagonal of N(A,B) from descending eigenvalues; every entry ≥ 0, N = 2 M².
Vec3 n_matrix(const Vec3& lambda_a, const Vec3& lambda_b) noexcept;

enum class Bound { lower, upper };

/// `published` divides by the bracket of kᵀMk directly. `second_order`
/// uses 2kᵀMk, the constant of the θ² term of ‖A−B‖² − ‖ΛA − ΛB‖².
enum class Normalisation { published, second_order };

struct ThetaEstimate {
    double value = 0;
    /// Normalizer underflow (min |c| < 1e-12 max |c|) or c = 0.
    bool degenerate = false;
};

/// θ ≈ √(semi / c) with c = max|Mii| (lower bound) or min|Mii| (upper bound).
ThetaEstimate theta_from_dE(const SymMat3& a, const SymMat3& b, Bound bound = Bound::lower,
                            Normalisation norm = Normalisation::published);
/// θ ≈ d_C / √c with c = max Nii (lower bound) or min Nii (upper bound).
ThetaEstimate theta_from_dC(const SymMat3& a, const SymMat3& b, Bound bound = Bound::lower);

struct DistanceReport {
    double d_riemann = 0;
    double d_chordal_scaled = 0;  ///< d_F / √2
    double d_C_raw = 0;
    double d_E_plus = 0;
    double d_E_minus = 0;
    double d_E_semi = 0;
    double hw_min_gap = 0;
    double hw_max_gap = 0;
    double theta_E_lb = 0, theta_E_ub = 0;
    double theta_C_lb = 0, theta_C_ub = 0;
    Vec3 m_diag{};
    Vec3 n_diag{};
    Vec3 lambda_a{};
    Vec3 lambda_b{};
    /// Pairs (1,2), (1,3), (2,3) with relative gap below the tolerance.
    std::array<bool, 3> degenerate_a{};
    std::array<bool, 3> degenerate_b{};
    bool theta_E_degenerate = false;
    bool theta_C_degenerate = false;
};

struct ReportOptions {
    double degeneracy_tol = 1e-8;
    CardanoOptions eigen{};
};

DistanceReport distance_report(const SymMat3& a, const SymMat3& b, const ReportOptions& opts = {});

/// Rotated-copy construction used by the illustrative sweeps: B = Q_B Λ_A Q_Bᵀ
/// with Q_B = Q_A Rᵀ and R = exp(θK).
SymMat3 rotate_in_eigenframe(const EigenDecomp& ea, const AxisAngle& aa) noexcept;

}  // namespace commdist
