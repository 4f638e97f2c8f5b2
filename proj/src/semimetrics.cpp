#include "commdist/semimetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace commdist {

namespace {

constexpr std::array<std::array<std::size_t, 3>, 6> kPermutations{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

std::array<double, 6> permutation_sums(const Vec3& la, const Vec3& lb) noexcept {
    std::array<double, 6> sums{};
    for (std::size_t p = 0; p < kPermutations.size(); ++p) {
        double s = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double d = la[i] - lb[kPermutations[p][i]];
            s += d * d;
        }
        sums[p] = s;
    }
    return sums;
}

double squared_distance(const SymMat3& a, const SymMat3& b) noexcept {
    const double n = frobenius_norm(a - b);
    return n * n;
}

ThetaEstimate normalized_estimate(double numerator, const Vec3& normalizer, Bound bound) noexcept {
    const Vec3 c{std::abs(normalizer[0]), std::abs(normalizer[1]), std::abs(normalizer[2])};
    const double cmax = std::max({c[0], c[1], c[2]});
    const double cmin = std::min({c[0], c[1], c[2]});
    const double chosen = bound == Bound::lower ? cmax : cmin;

    ThetaEstimate out;
    out.degenerate = !(cmin >= 1e-12 * cmax) || cmax == 0.0;
    if (chosen == 0.0) {
        out.degenerate = true;
        out.value = numerator == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = std::sqrt(numerator / chosen);
    return out;
}

}  // namespace

double d_commutator(const SymMat3& a, const SymMat3& b) noexcept { return frobenius_norm(commutator(a, b)); }

HoffmanWielandtGap hoffman_wielandt_gap(const Vec3& lambda_a, const Vec3& lambda_b) noexcept {
    const auto sums = permutation_sums(lambda_a, lambda_b);
    return {*std::min_element(sums.begin(), sums.end()), *std::max_element(sums.begin(), sums.end())};
}

HoffmanWielandtGap hoffman_wielandt_gap(const SymMat3& a, const SymMat3& b) {
    return hoffman_wielandt_gap(eigenvalues(a), eigenvalues(b));
}

DEResult d_E_pm(const SymMat3& a, const SymMat3& b, const Vec3& lambda_a, const Vec3& lambda_b) noexcept {
    const double dist2 = squared_distance(a, b);
    const auto sums = permutation_sums(lambda_a, lambda_b);
    DEResult r;
    r.d_plus = -std::numeric_limits<double>::infinity();
    r.d_minus = std::numeric_limits<double>::infinity();
    r.semi = std::numeric_limits<double>::infinity();
    for (double s : sums) {
        r.d_plus = std::max(r.d_plus, dist2 - s);
        r.d_minus = std::min(r.d_minus, -dist2 + s);
        r.semi = std::min(r.semi, std::abs(dist2 - s));
    }
    return r;
}

DEResult d_E_pm(const SymMat3& a, const SymMat3& b) {
    return d_E_pm(a, b, eigenvalues(a), eigenvalues(b));
}

Vec3 m_matrix(const Vec3& la, const Vec3& lb) noexcept {
    return {-(la[1] - la[2]) * (lb[1] - lb[2]), -(la[0] - la[2]) * (lb[0] - lb[2]),
            -(la[0] - la[1]) * (lb[0] - lb[1])};
}

Vec3 n_matrix(const Vec3& la, const Vec3& lb) noexcept {
    auto sq = [](double x) { return x * x; };
    return {2.0 * sq(la[1] - la[2]) * sq(lb[1] - lb[2]), 2.0 * sq(la[0] - la[2]) * sq(lb[0] - lb[2]),
            2.0 * sq(la[0] - la[1]) * sq(lb[0] - lb[1])};
}

ThetaEstimate theta_from_dE(const SymMat3& a, const SymMat3& b, Bound bound, Normalisation norm) {
    const Vec3 la = eigenvalues(a);
    const Vec3 lb = eigenvalues(b);
    Vec3 m = m_matrix(la, lb);
    if (norm == Normalisation::second_order) m = {2 * m[0], 2 * m[1], 2 * m[2]};
    return normalized_estimate(d_E_pm(a, b, la, lb).semi, m, bound);
}

ThetaEstimate theta_from_dC(const SymMat3& a, const SymMat3& b, Bound bound) {
    const Vec3 n = n_matrix(eigenvalues(a), eigenvalues(b));
    const double dc = d_commutator(a, b);
    return normalized_estimate(dc * dc, n, bound);
}

DistanceReport distance_report(const SymMat3& a, const SymMat3& b, const ReportOptions& opts) {
    DistanceReport r;
    const EigenDecomp ea = eigh3_cardano(a, opts.eigen);
    const EigenDecomp eb = eigh3_cardano(b, opts.eigen);
    r.lambda_a = ea.lambda;
    r.lambda_b = eb.lambda;

    r.d_riemann = min_rotation_distance(ea, eb, RotationMetric::riemann).distance;
    r.d_chordal_scaled = min_rotation_distance(ea, eb, RotationMetric::chordal).distance / std::numbers::sqrt2;

    r.d_C_raw = d_commutator(a, b);
    const DEResult de = d_E_pm(a, b, ea.lambda, eb.lambda);
    r.d_E_plus = de.d_plus;
    r.d_E_minus = de.d_minus;
    r.d_E_semi = de.semi;
    const HoffmanWielandtGap hw = hoffman_wielandt_gap(ea.lambda, eb.lambda);
    r.hw_min_gap = hw.min_gap;
    r.hw_max_gap = hw.max_gap;

    r.m_diag = m_matrix(ea.lambda, eb.lambda);
    r.n_diag = n_matrix(ea.lambda, eb.lambda);

    const ThetaEstimate e_lb = normalized_estimate(de.semi, r.m_diag, Bound::lower);
    const ThetaEstimate e_ub = normalized_estimate(de.semi, r.m_diag, Bound::upper);
    const ThetaEstimate c_lb = normalized_estimate(r.d_C_raw * r.d_C_raw, r.n_diag, Bound::lower);
    const ThetaEstimate c_ub = normalized_estimate(r.d_C_raw * r.d_C_raw, r.n_diag, Bound::upper);
    r.theta_E_lb = e_lb.value;
    r.theta_E_ub = e_ub.value;
    r.theta_C_lb = c_lb.value;
    r.theta_C_ub = c_ub.value;
    r.theta_E_degenerate = e_lb.degenerate || e_ub.degenerate;
    r.theta_C_degenerate = c_lb.degenerate || c_ub.degenerate;

    const Vec3 ga = relative_gaps(ea.lambda);
    const Vec3 gb = relative_gaps(eb.lambda);
    for (std::size_t k = 0; k < 3; ++k) {
        r.degenerate_a[k] = ga[k] < opts.degeneracy_tol;
        r.degenerate_b[k] = gb[k] < opts.degeneracy_tol;
    }
    return r;
}

SymMat3 rotate_in_eigenframe(const EigenDecomp& ea, const AxisAngle& aa) noexcept {
    const Mat3 qb = ea.q * rodrigues_exp(aa).matrix().transposed();
    return SymMat3::from_eigen(ea.lambda, qb);
}

}  // namespace commdist
