#include "commdist/so3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "commdist/error.hpp"

namespace commdist {

Mat3 skew(const Vec3& k) noexcept { return {{0, -k[2], k[1], k[2], 0, -k[0], -k[1], k[0], 0}}; }

Vec3 vee(const Mat3& s) noexcept {
    return {0.5 * (s(2, 1) - s(1, 2)), 0.5 * (s(0, 2) - s(2, 0)), 0.5 * (s(1, 0) - s(0, 1))};
}

double rotation_defect(const Mat3& r) noexcept {
    const double ortho = frobenius_norm(r.transposed() * r - Mat3::identity());
    return std::max(ortho, std::abs(r.determinant() - 1.0));
}

Rotation3::Rotation3(const Mat3& r, double tol) : r_(r) {
    if (!(rotation_defect(r) <= tol)) throw Error(ErrorKind::NotARotation, "matrix is not a proper rotation");
}

Rotation3 Rotation3::unchecked(const Mat3& r) noexcept {
    Rotation3 out;
    out.r_ = r;
    return out;
}

AxisAngle AxisAngle::make(const Vec3& axis, double theta) {
    const double n = norm(axis);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::InputNotFinite, "rotation axis must be a nonzero finite vector");
    return {{axis[0] / n, axis[1] / n, axis[2] / n}, theta};
}

Rotation3 rodrigues_exp(const AxisAngle& aa) noexcept {
    const Mat3 k = aa.K();
    const Mat3 k2 = k * k;
    return Rotation3::unchecked(Mat3::identity() + std::sin(aa.theta) * k + (1.0 - std::cos(aa.theta)) * k2);
}

AxisAngle so3_log(const Rotation3& rot) {
    const Mat3& r = rot.matrix();
    if (!(rotation_defect(r) <= 1e-6)) throw Error(ErrorKind::NotARotation, "so3_log requires a proper rotation");

    const Vec3 w = vee(r);  // sinθ · k
    const double s = norm(w);
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    const double theta = std::atan2(s, c);

    AxisAngle out;
    out.theta = theta;
    if (s == 0.0 && c > 0) {
        out.k = {0, 0, 1};
        return out;
    }
    if (theta < std::numbers::pi - 1e-5) {
        out.k = {w[0] / s, w[1] / s, w[2] / s};
        return out;
    }
    // Near π: ½(R + Rᵀ) = cosθ I + (1 − cosθ) k kᵀ.
    Mat3 kk;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            kk(i, j) = (0.5 * (r(i, j) + r(j, i)) - (i == j ? c : 0.0)) / (1.0 - c);
    std::size_t col = 0;
    for (std::size_t i = 1; i < 3; ++i)
        if (kk(i, i) > kk(col, col)) col = i;
    Vec3 k = kk.column(col);
    const double n = norm(k);
    k = {k[0] / n, k[1] / n, k[2] / n};
    if (dot(k, w) < 0) k = {-k[0], -k[1], -k[2]};
    out.k = k;
    return out;
}

double d_riemann(const Rotation3& qa, const Rotation3& qb) {
    return so3_log(qa * qb.transposed()).theta;
}

double d_chordal(const Rotation3& qa, const Rotation3& qb) noexcept {
    return frobenius_norm(qa.matrix() - qb.matrix());
}

Mat3 ColumnAction::apply(const Mat3& q) const noexcept {
    Mat3 out;
    for (std::size_t j = 0; j < 3; ++j) {
        const Vec3 c = q.column(perm[j]);
        out.set_column(j, {sign[j] * c[0], sign[j] * c[1], sign[j] * c[2]});
    }
    return out;
}

Vec3 ColumnAction::apply(const Vec3& lambda) const noexcept {
    return {lambda[perm[0]], lambda[perm[1]], lambda[perm[2]]};
}

const std::array<ColumnAction, 24>& column_actions() noexcept {
    static const std::array<ColumnAction, 24> actions = [] {
        std::array<ColumnAction, 24> out{};
        constexpr std::array<std::array<int, 3>, 4> even{{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}};
        constexpr std::array<std::array<int, 3>, 4> odd{{{-1, -1, -1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, -1}}};
        std::array<std::size_t, 3> perm{0, 1, 2};
        std::size_t n = 0;
        do {
            // Parity via inversion count.
            int inversions = 0;
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = i + 1; j < 3; ++j)
                    if (perm[i] > perm[j]) ++inversions;
            const auto& signs = (inversions % 2 == 0) ? even : odd;
            for (const auto& s : signs) out[n++] = ColumnAction{perm, s};
        } while (std::next_permutation(perm.begin(), perm.end()));
        return out;
    }();
    return actions;
}

RotationMatch min_rotation_distance(const EigenDecomp& ea, const EigenDecomp& eb, RotationMetric metric) {
    RotationMatch best;
    best.qa = Rotation3::unchecked(ea.q);
    best.distance = std::numeric_limits<double>::infinity();
    const auto& actions = column_actions();
    for (std::size_t idx = 0; idx < actions.size(); ++idx) {
        const Rotation3 qb = Rotation3::unchecked(actions[idx].apply(eb.q));
        const double d = metric == RotationMetric::riemann ? d_riemann(best.qa, qb) : d_chordal(best.qa, qb);
        if (d < best.distance) {
            best.distance = d;
            best.qb = qb;
            best.candidate = idx;
            best.action = actions[idx];
        }
    }
    return best;
}

}  // namespace commdist
