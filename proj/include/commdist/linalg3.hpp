#pragma once

// Fixed-size 3x3 linear algebra for real symmetric matrices: products,
// norms, commutators and two independent eigensolvers (closed-form
// Cardano + cross products, and cyclic Jacobi).

#include <array>
#include <cmath>
#include <cstddef>

namespace commdist {

using Vec3 = std::array<double, 3>;

/// General 3x3 matrix, row-major.
struct Mat3 {
    std::array<double, 9> m{};

    constexpr double& operator()(std::size_t i, std::size_t j) noexcept { return m[3 * i + j]; }
    constexpr double operator()(std::size_t i, std::size_t j) const noexcept { return m[3 * i + j]; }

    static constexpr Mat3 zero() noexcept { return {}; }
    static constexpr Mat3 identity() noexcept { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
    static Mat3 diag(const Vec3& d) noexcept;
    static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) noexcept;

    Vec3 column(std::size_t j) const noexcept { return {m[j], m[3 + j], m[6 + j]}; }
    void set_column(std::size_t j, const Vec3& v) noexcept;

    Mat3 transposed() const noexcept;
    double trace() const noexcept { return m[0] + m[4] + m[8]; }
    double determinant() const noexcept;

    friend bool operator==(const Mat3&, const Mat3&) = default;
};

Mat3 operator+(const Mat3& a, const Mat3& b) noexcept;
Mat3 operator-(const Mat3& a, const Mat3& b) noexcept;
Mat3 operator*(const Mat3& a, const Mat3& b) noexcept;
Mat3 operator*(double s, const Mat3& a) noexcept;
Vec3 operator*(const Mat3& a, const Vec3& v) noexcept;

/// Frobenius inner product tr(A Bᵀ).
double frobenius_dot(const Mat3& a, const Mat3& b) noexcept;
double frobenius_norm(const Mat3& a) noexcept;
/// Adjugate (transpose of the cofactor matrix); a·adj(a) = det(a)·I.
Mat3 adjugate(const Mat3& a) noexcept;

double dot(const Vec3& a, const Vec3& b) noexcept;
Vec3 cross(const Vec3& a, const Vec3& b) noexcept;
double norm(const Vec3& a) noexcept;

/// Real symmetric 3x3 matrix; only the upper triangle is stored.
struct SymMat3 {
    double a11 = 0, a22 = 0, a33 = 0, a12 = 0, a13 = 0, a23 = 0;

    static constexpr SymMat3 identity() noexcept { return {1, 1, 1, 0, 0, 0}; }
    static constexpr SymMat3 diag(double d1, double d2, double d3) noexcept { return {d1, d2, d3, 0, 0, 0}; }
    /// Symmetric part ½(A + Aᵀ) of a general matrix.
    static SymMat3 from_mat(const Mat3& a) noexcept;
    /// Q·diag(lambda)·Qᵀ.
    static SymMat3 from_eigen(const Vec3& lambda, const Mat3& q) noexcept;

    double operator()(std::size_t i, std::size_t j) const noexcept;
    Mat3 to_mat() const noexcept;
    double trace() const noexcept { return a11 + a22 + a33; }
    double determinant() const noexcept { return to_mat().determinant(); }
    bool is_finite() const noexcept;

    /// Coefficients in storage order (11, 22, 33, 12, 13, 23).
    std::array<double, 6> coefficients() const noexcept { return {a11, a22, a33, a12, a13, a23}; }
    static SymMat3 from_coefficients(const std::array<double, 6>& c) noexcept {
        return {c[0], c[1], c[2], c[3], c[4], c[5]};
    }

    friend bool operator==(const SymMat3&, const SymMat3&) = default;
};

SymMat3 operator+(const SymMat3& a, const SymMat3& b) noexcept;
SymMat3 operator-(const SymMat3& a, const SymMat3& b) noexcept;
SymMat3 operator*(double s, const SymMat3& a) noexcept;

double frobenius_norm(const SymMat3& a) noexcept;
/// AB − BA; skew-symmetric for symmetric arguments.
Mat3 commutator(const SymMat3& a, const SymMat3& b) noexcept;
/// A − ⅓ tr(A) I.
SymMat3 deviator(const SymMat3& a) noexcept;
/// Q A Qᵀ.
SymMat3 conjugate(const Mat3& q, const SymMat3& a) noexcept;

/// Sorted eigenvalues (descending) and a proper orthogonal matrix whose
/// columns are the matching eigenvectors: A = Q diag(lambda) Qᵀ.
struct EigenDecomp {
    Vec3 lambda{};
    Mat3 q = Mat3::identity();

    SymMat3 reconstruct() const noexcept { return SymMat3::from_eigen(lambda, q); }
};

/// Pairwise gaps |λ1−λ2|, |λ1−λ3|, |λ2−λ3| divided by the spectral radius.
/// A zero matrix reports all gaps as 0.
Vec3 relative_gaps(const Vec3& lambda) noexcept;
double min_relative_gap(const Vec3& lambda) noexcept;

struct CardanoOptions {
    /// Relative gap below which the whole decomposition is delegated to Jacobi.
    double gap_tol = 1e-6;
    double jacobi_tol = 1e-15;
};

/// Eigenvalues only, by Cardano's trigonometric closed form, sorted descending.
Vec3 eigenvalues_cardano(const SymMat3& a);

/// Descending eigenvalues: closed form, or Jacobi when two are closer than `gap_tol`.
Vec3 eigenvalues(const SymMat3& a, const CardanoOptions& opts = {});

/// Closed-form eigenvalues plus cross-product eigenvectors; falls back to
/// eigh3_jacobi when two eigenvalues are closer than `gap_tol`.
/// Throws Error(InputNotFinite).
EigenDecomp eigh3_cardano(const SymMat3& a, const CardanoOptions& opts = {});

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
/// tol·‖A‖. Throws Error(NonConvergence) after 100 sweeps, Error(InputNotFinite).
EigenDecomp eigh3_jacobi(const SymMat3& a, double tol = 1e-15);

/// Applies the canonical ordering and sign convention in place: eigenvalues
/// descending, each column's largest-magnitude entry positive, then the
/// last column flipped if needed so det Q = +1.
void canonicalize(EigenDecomp& e) noexcept;

}  // namespace commdist
