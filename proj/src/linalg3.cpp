#include "commdist/linalg3.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <utility>

#include "commdist/error.hpp"

namespace commdist {

Mat3 Mat3::diag(const Vec3& d) noexcept { return {{d[0], 0, 0, 0, d[1], 0, 0, 0, d[2]}}; }

Mat3 Mat3::from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) noexcept {
    return {{c0[0], c1[0], c2[0], c0[1], c1[1], c2[1], c0[2], c1[2], c2[2]}};
}

void Mat3::set_column(std::size_t j, const Vec3& v) noexcept {
    m[j] = v[0];
    m[3 + j] = v[1];
    m[6 + j] = v[2];
}

Mat3 Mat3::transposed() const noexcept {
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
}

double Mat3::determinant() const noexcept {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 operator+(const Mat3& a, const Mat3& b) noexcept {
    Mat3 r;
    for (std::size_t k = 0; k < 9; ++k) r.m[k] = a.m[k] + b.m[k];
    return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) noexcept {
    Mat3 r;
    for (std::size_t k = 0; k < 9; ++k) r.m[k] = a.m[k] - b.m[k];
    return r;
}

Mat3 operator*(const Mat3& a, const Mat3& b) noexcept {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
    return r;
}

Mat3 operator*(double s, const Mat3& a) noexcept {
    Mat3 r;
    for (std::size_t k = 0; k < 9; ++k) r.m[k] = s * a.m[k];
    return r;
}

Vec3 operator*(const Mat3& a, const Vec3& v) noexcept {
    return {a(0, 0) * v[0] + a(0, 1) * v[1] + a(0, 2) * v[2],
            a(1, 0) * v[0] + a(1, 1) * v[1] + a(1, 2) * v[2],
            a(2, 0) * v[0] + a(2, 1) * v[1] + a(2, 2) * v[2]};
}

double frobenius_dot(const Mat3& a, const Mat3& b) noexcept {
    double s = 0;
    for (std::size_t k = 0; k < 9; ++k) s += a.m[k] * b.m[k];
    return s;
}

double frobenius_norm(const Mat3& a) noexcept { return std::sqrt(frobenius_dot(a, a)); }

Mat3 adjugate(const Mat3& a) noexcept {
    Mat3 r;
    r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return r;
}

double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------

SymMat3 SymMat3::from_mat(const Mat3& a) noexcept {
    return {a(0, 0), a(1, 1), a(2, 2), 0.5 * (a(0, 1) + a(1, 0)), 0.5 * (a(0, 2) + a(2, 0)),
            0.5 * (a(1, 2) + a(2, 1))};
}

SymMat3 SymMat3::from_eigen(const Vec3& lambda, const Mat3& q) noexcept {
    SymMat3 r;
    auto entry = [&](std::size_t i, std::size_t j) {
        return lambda[0] * q(i, 0) * q(j, 0) + lambda[1] * q(i, 1) * q(j, 1) + lambda[2] * q(i, 2) * q(j, 2);
    };
    r.a11 = entry(0, 0);
    r.a22 = entry(1, 1);
    r.a33 = entry(2, 2);
    r.a12 = entry(0, 1);
    r.a13 = entry(0, 2);
    r.a23 = entry(1, 2);
    return r;
}

double SymMat3::operator()(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    if (i == j) return i == 0 ? a11 : (i == 1 ? a22 : a33);
    if (i == 0) return j == 1 ? a12 : a13;
    return a23;
}

Mat3 SymMat3::to_mat() const noexcept { return {{a11, a12, a13, a12, a22, a23, a13, a23, a33}}; }

bool SymMat3::is_finite() const noexcept {
    for (double c : coefficients())
        if (!std::isfinite(c)) return false;
    return true;
}

SymMat3 operator+(const SymMat3& a, const SymMat3& b) noexcept {
    return {a.a11 + b.a11, a.a22 + b.a22, a.a33 + b.a33, a.a12 + b.a12, a.a13 + b.a13, a.a23 + b.a23};
}

SymMat3 operator-(const SymMat3& a, const SymMat3& b) noexcept {
    return {a.a11 - b.a11, a.a22 - b.a22, a.a33 - b.a33, a.a12 - b.a12, a.a13 - b.a13, a.a23 - b.a23};
}

SymMat3 operator*(double s, const SymMat3& a) noexcept {
    return {s * a.a11, s * a.a22, s * a.a33, s * a.a12, s * a.a13, s * a.a23};
}

double frobenius_norm(const SymMat3& a) noexcept {
    return std::sqrt(a.a11 * a.a11 + a.a22 * a.a22 + a.a33 * a.a33 +
                     2.0 * (a.a12 * a.a12 + a.a13 * a.a13 + a.a23 * a.a23));
}

Mat3 commutator(const SymMat3& a, const SymMat3& b) noexcept {
    const Mat3 am = a.to_mat();
    const Mat3 bm = b.to_mat();
    return am * bm - bm * am;
}

SymMat3 deviator(const SymMat3& a) noexcept {
    const double m = a.trace() / 3.0;
    return {a.a11 - m, a.a22 - m, a.a33 - m, a.a12, a.a13, a.a23};
}

SymMat3 conjugate(const Mat3& q, const SymMat3& a) noexcept {
    return SymMat3::from_mat(q * a.to_mat() * q.transposed());
}

// ---------------------------------------------------------------------------

Vec3 relative_gaps(const Vec3& lambda) noexcept {
    const double scale = std::max({std::abs(lambda[0]), std::abs(lambda[1]), std::abs(lambda[2])});
    if (scale == 0.0) return {0, 0, 0};
    return {std::abs(lambda[0] - lambda[1]) / scale, std::abs(lambda[0] - lambda[2]) / scale,
            std::abs(lambda[1] - lambda[2]) / scale};
}

double min_relative_gap(const Vec3& lambda) noexcept {
    const Vec3 g = relative_gaps(lambda);
    return std::min({g[0], g[1], g[2]});
}

void canonicalize(EigenDecomp& e) noexcept {
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return e.lambda[x] > e.lambda[y]; });
    EigenDecomp sorted;
    for (std::size_t k = 0; k < 3; ++k) {
        sorted.lambda[k] = e.lambda[order[k]];
        Vec3 v = e.q.column(order[k]);
        std::size_t big = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (std::abs(v[i]) > std::abs(v[big])) big = i;
        if (v[big] < 0) v = {-v[0], -v[1], -v[2]};
        sorted.q.set_column(k, v);
    }
    if (sorted.q.determinant() < 0) {
        Vec3 v = sorted.q.column(2);
        sorted.q.set_column(2, {-v[0], -v[1], -v[2]});
    }
    e = sorted;
}

namespace {

void require_finite(const SymMat3& a) {
    if (!a.is_finite()) throw Error(ErrorKind::InputNotFinite, "matrix has NaN or infinite entries");
}

// Null vector of the rank-2 matrix A − λI: the largest of the three column
// cross products (proportional to a column of the adjugate).
Vec3 null_vector(const SymMat3& a, double lambda) {
    Mat3 b = a.to_mat();
    for (std::size_t i = 0; i < 3; ++i) b(i, i) -= lambda;
    const Vec3 u = b.column(0), v = b.column(1), w = b.column(2);
    const std::array<Vec3, 3> candidates{cross(u, v), cross(u, w), cross(v, w)};
    std::size_t best = 0;
    double best_norm = -1;
    for (std::size_t k = 0; k < 3; ++k) {
        const double n = norm(candidates[k]);
        if (n > best_norm) {
            best_norm = n;
            best = k;
        }
    }
    if (best_norm == 0.0) return {0, 0, 0};
    const Vec3& c = candidates[best];
    return {c[0] / best_norm, c[1] / best_norm, c[2] / best_norm};
}

}  // namespace

Vec3 eigenvalues_cardano(const SymMat3& a) {
    require_finite(a);
    const double m = a.trace() / 3.0;
    const SymMat3 s = deviator(a);
    const double q = 0.5 * s.determinant();
    const double p = (s.a11 * s.a11 + s.a22 * s.a22 + s.a33 * s.a33 +
                      2.0 * (s.a12 * s.a12 + s.a13 * s.a13 + s.a23 * s.a23)) / 6.0;
    if (p == 0.0) return {m, m, m};
    const double disc = std::max(p * p * p - q * q, 0.0);
    const double phi = std::clamp(std::atan2(std::sqrt(disc), q) / 3.0, 0.0, std::numbers::pi / 3.0);
    const double sp = std::sqrt(p);
    const double c = std::cos(phi), sn = std::sin(phi);
    Vec3 lambda{m + 2.0 * sp * c, m - sp * (c + std::numbers::sqrt3 * sn), m - sp * (c - std::numbers::sqrt3 * sn)};
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return lambda;
}

Vec3 eigenvalues(const SymMat3& a, const CardanoOptions& opts) {
    const Vec3 lambda = eigenvalues_cardano(a);
    if (min_relative_gap(lambda) < opts.gap_tol) return eigh3_jacobi(a, opts.jacobi_tol).lambda;
    return lambda;
}

EigenDecomp eigh3_cardano(const SymMat3& a, const CardanoOptions& opts) {
    require_finite(a);
    const Vec3 lambda = eigenvalues_cardano(a);
    if (min_relative_gap(lambda) < opts.gap_tol) return eigh3_jacobi(a, opts.jacobi_tol);

    // Most isolated eigenvalue first; it has the best-conditioned null vector.
    const Vec3 g = relative_gaps(lambda);
    const std::array<double, 3> isolation{std::min(g[0], g[1]), std::min(g[0], g[2]), std::min(g[1], g[2])};
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return isolation[x] > isolation[y]; });

    const Vec3 v0 = null_vector(a, lambda[order[0]]);
    Vec3 v1 = null_vector(a, lambda[order[1]]);
    const double proj = dot(v0, v1);
    v1 = {v1[0] - proj * v0[0], v1[1] - proj * v0[1], v1[2] - proj * v0[2]};
    const double n1 = norm(v1);
    if (norm(v0) == 0.0 || n1 < 1e-8) return eigh3_jacobi(a, opts.jacobi_tol);
    v1 = {v1[0] / n1, v1[1] / n1, v1[2] / n1};
    const Vec3 v2 = cross(v0, v1);

    EigenDecomp e;
    e.lambda = lambda;
    e.q.set_column(order[0], v0);
    e.q.set_column(order[1], v1);
    e.q.set_column(order[2], v2);
    canonicalize(e);
    return e;
}

EigenDecomp eigh3_jacobi(const SymMat3& a, double tol) {
    require_finite(a);
    Mat3 w = a.to_mat();
    Mat3 v = Mat3::identity();
    const double scale = frobenius_norm(a);
    auto off = [&] { return std::sqrt(2.0 * (w(0, 1) * w(0, 1) + w(0, 2) * w(0, 2) + w(1, 2) * w(1, 2))); };

    constexpr int max_sweeps = 100;
    int sweep = 0;
    for (; sweep < max_sweeps && off() > tol * scale; ++sweep) {
        for (std::size_t p = 0; p < 2; ++p) {
            for (std::size_t q = p + 1; q < 3; ++q) {
                const double apq = w(p, q);
                if (apq == 0.0) continue;
                // Rutishauser's rotation: t = sgn(θ)/(|θ| + √(θ² + 1)), θ = (a_qq − a_pp)/(2 a_pq).
                const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < 3; ++k) {
                    const double wkp = w(k, p), wkq = w(k, q);
                    w(k, p) = c * wkp - s * wkq;
                    w(k, q) = s * wkp + c * wkq;
                }
                for (std::size_t k = 0; k < 3; ++k) {
                    const double wpk = w(p, k), wqk = w(q, k);
                    w(p, k) = c * wpk - s * wqk;
                    w(q, k) = s * wpk + c * wqk;
                }
                w(p, q) = w(q, p) = 0.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (off() > tol * scale) throw Error(ErrorKind::NonConvergence, "Jacobi did not converge in 100 sweeps");

    EigenDecomp e;
    e.lambda = {w(0, 0), w(1, 1), w(2, 2)};
    e.q = v;
    canonicalize(e);
    return e;
}

}  // namespace commdist
