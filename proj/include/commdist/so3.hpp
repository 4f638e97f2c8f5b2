#pragma once

// Rotation group SO(3): Rodrigues exponential, logarithm, the geodesic
// (Riemannian) and chordal metrics, and the search over eigenvector
// column permutations / sign flips that picks the closest representative.

#include <array>
#include <cstddef>

#include "commdist/linalg3.hpp"

namespace commdist {

/// Skew matrix K with K x = k × x.
Mat3 skew(const Vec3& k) noexcept;
/// Inverse of skew() on the antisymmetric part: ½ vee(S − Sᵀ).
Vec3 vee(const Mat3& s) noexcept;

class Rotation3 {
public:
    Rotation3() = default;
    /// Validates RᵀR = I and det R = +1 within `tol`; throws Error(NotARotation).
    explicit Rotation3(const Mat3& r, double tol = 1e-6);

    static Rotation3 identity() noexcept { return {}; }
    /// Wraps without validation. Callers guarantee orthogonality.
    static Rotation3 unchecked(const Mat3& r) noexcept;

    const Mat3& matrix() const noexcept { return r_; }
    Rotation3 transposed() const noexcept { return unchecked(r_.transposed()); }

    friend Rotation3 operator*(const Rotation3& a, const Rotation3& b) noexcept { return unchecked(a.r_ * b.r_); }

private:
    Mat3 r_ = Mat3::identity();
};

/// Orthogonality defect ‖RᵀR − I‖ and |det R − 1| combined (max of the two).
double rotation_defect(const Mat3& r) noexcept;

struct AxisAngle {
    Vec3 k{0, 0, 1};
    double theta = 0;

    /// Normalizes `axis`; theta is taken as given.
    static AxisAngle make(const Vec3& axis, double theta);
    Mat3 K() const noexcept { return skew(k); }
};

/// I + sinθ K + (1 − cosθ) K².
Rotation3 rodrigues_exp(const AxisAngle& aa) noexcept;

/// θ ∈ [0, π] and unit axis with rodrigues_exp(so3_log(R)) = R. For R = I the
/// axis is fixed to (0, 0, 1); near π it comes from the symmetric part.
AxisAngle so3_log(const Rotation3& r);

/// Geodesic angle of QA·QBᵀ, in [0, π].
double d_riemann(const Rotation3& qa, const Rotation3& qb);
/// ‖QA − QB‖ (Frobenius) = 2√2 sin(d_riemann/2).
double d_chordal(const Rotation3& qa, const Rotation3& qb) noexcept;

enum class RotationMetric { riemann, chordal };

/// Signed permutation matrix G with det = +1; Q·G permutes and flips columns of Q.
struct ColumnAction {
    std::array<std::size_t, 3> perm{0, 1, 2};  ///< column j of Q·G is column perm[j] of Q
    std::array<int, 3> sign{1, 1, 1};

    Mat3 apply(const Mat3& q) const noexcept;
    Vec3 apply(const Vec3& lambda) const noexcept;
};

/// The 24 proper signed permutations, in lexicographic (permutation, sign pattern) order.
const std::array<ColumnAction, 24>& column_actions() noexcept;

struct RotationMatch {
    double distance = 0;
    Rotation3 qa;
    Rotation3 qb;             ///< representative Q_B·G that attains the minimum
    std::size_t candidate = 0;  ///< index into column_actions()
    ColumnAction action;
};

/// Minimizes the chosen metric over the 24 proper column relabelings of Q_B.
/// Ties keep the lowest candidate index.
RotationMatch min_rotation_distance(const EigenDecomp& ea, const EigenDecomp& eb,
                                    RotationMetric metric = RotationMetric::riemann);

}  // namespace commdist
