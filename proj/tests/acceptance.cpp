// Acceptance checks: one PASS/FAIL line per criterion, plus the measured
// numbers behind it. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "commdist/classify.hpp"
#include "commdist/error.hpp"
#include "commdist/experiments.hpp"
#include "commdist/features.hpp"
#include "commdist/linalg3.hpp"
#include "commdist/semimetrics.hpp"
#include "commdist/spectral.hpp"

using namespace commdist;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Vec3 reorder_desc(Vec3 v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

double max_abs_diff(const Vec3& a, const Vec3& b) {
    return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

void fig1() {
    const auto t0 = Clock::now();
    const auto rows = fig1_sweep(0.0, 0.1, 100);
    const double dt = seconds_since(t0);
    double err_r = 0, err_f = 0, e_min = 1e300, e_max = -1e300, taylor_f = 0;
    for (const auto& row : rows) {
        err_r = std::max(err_r, std::abs(row.report.d_riemann - row.theta) / row.theta);
        err_f = std::max(err_f, std::abs(row.report.d_chordal_scaled - row.theta) / row.theta);
        // d_F/√2 = 2 sin(θ/2): its error against θ is θ²/24 by construction, not a solver effect.
        const double exact = 2 * std::sin(row.theta / 2);
        taylor_f = std::max(taylor_f, std::abs(row.report.d_chordal_scaled - exact) / exact);
        const double e = 100.0 * (row.report.theta_E_lb - row.theta) / row.theta;
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
    }
    const bool ok = rows.size() == 100 && err_r <= 1e-6 && err_f <= 1e-6 && e_min >= 0.8 && e_max <= 2.2 && dt < 1.0;
    report("fig1_reproduction", ok,
           fmt("rows=%zu max_relerr_dR=%.2e max_relerr_dF/sqrt2=%.2e (theta^2/24 at 0.1 = %.2e; "
               "vs 2sin(theta/2): %.2e) thetaE_relerr=[%.3f%%, %.3f%%] (target 1.5±0.7) time=%.3fs",
               rows.size(), err_r, err_f, 0.01 / 24, taylor_f, e_min, e_max, dt));
}

void fig2() {
    const auto t0 = Clock::now();
    const auto rows = fig2_sweep(1e-3, 1e-1, 60);
    const double dt = seconds_since(t0);
    double max_e = 0, max_c = 0, max_jump = 0, min_ratio = 1e300;
    bool finite = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k].report;
        finite = finite && std::isfinite(r.theta_E_lb) && std::isfinite(r.theta_C_lb) && std::isfinite(r.d_riemann);
        max_e = std::max(max_e, r.theta_E_lb);
        max_c = std::max(max_c, r.theta_C_lb);
        if (k > 0) {
            const auto& p = rows[k - 1].report;
            max_jump = std::max({max_jump, std::abs(r.theta_E_lb - p.theta_E_lb), std::abs(r.theta_C_lb - p.theta_C_lb)});
        }
        if (rows[k].eps <= 3e-3 * (1 + 1e-12)) min_ratio = std::min(min_ratio, r.d_riemann / r.theta_E_lb);
    }
    // Continuity on a 60-point log grid: no step larger than a tenth of the bound.
    const bool ok = finite && max_e <= 0.2 && max_c <= 0.2 && max_jump <= 0.02 && min_ratio >= 5.0 && dt < 1.0;
    report("fig2_qualitative", ok,
           fmt("max_thetaE=%.4f max_thetaC=%.4f max_step=%.4f min(dR/thetaE | eps<=3e-3)=%.2f time=%.3fs", max_e, max_c,
               max_jump, min_ratio, dt));
}

void solver_equivalence() {
    std::mt19937_64 rng(20241);
    const auto t0 = Clock::now();
    double max_eig = 0, max_res = 0;
    std::size_t checked_res = 0;
    for (int n = 0; n < 10000; ++n) {
        const SymMat3 a = random_symmetric(rng);
        const Vec3 lc = eigenvalues_cardano(a);
        const EigenDecomp ej = eigh3_jacobi(a);
        max_eig = std::max(max_eig, max_abs_diff(lc, ej.lambda));
        if (min_relative_gap(lc) > 1e-4) {
            const EigenDecomp ec = eigh3_cardano(a);
            max_res = std::max(max_res, frobenius_norm(ec.reconstruct() - a));
            ++checked_res;
        }
    }
    const double dt = seconds_since(t0);
    report("solver_oracle_equivalence", max_eig <= 1e-10 && max_res <= 1e-10 && dt < 10.0,
           fmt("n=10000 max|lambda_cardano-lambda_jacobi|=%.2e max_residual=%.2e (over %zu with gap>1e-4) time=%.3fs",
               max_eig, max_res, checked_res, dt));
}

void hoffman_wielandt() {
    std::mt19937_64 rng(777);
    std::size_t violations = 0;
    double worst = -1e300;
    for (int n = 0; n < 10000; ++n) {
        const SymMat3 a = random_symmetric(rng), b = random_symmetric(rng);
        const double x = std::pow(frobenius_norm(a - b), 2);
        const auto hw = hoffman_wielandt_gap(a, b);
        const double v = std::max(hw.min_gap - x, x - hw.max_gap);
        worst = std::max(worst, v);
        if (v > 1e-12) ++violations;
    }
    report("hoffman_wielandt_sandwich", violations == 0,
           fmt("n=10000 violations=%zu worst_excess=%.2e", violations, worst));
}

double report_diff(const DistanceReport& a, const DistanceReport& b) {
    const double fa[] = {a.d_riemann, a.d_chordal_scaled, a.d_C_raw,    a.d_E_plus,   a.d_E_minus,  a.d_E_semi,
                         a.hw_min_gap, a.hw_max_gap,      a.theta_E_lb, a.theta_E_ub, a.theta_C_lb, a.theta_C_ub};
    const double fb[] = {b.d_riemann, b.d_chordal_scaled, b.d_C_raw,    b.d_E_plus,   b.d_E_minus,  b.d_E_semi,
                         b.hw_min_gap, b.hw_max_gap,      b.theta_E_lb, b.theta_E_ub, b.theta_C_lb, b.theta_C_ub};
    double d = 0;
    for (std::size_t k = 0; k < std::size(fa); ++k) d = std::max(d, std::abs(fa[k] - fb[k]));
    for (Vec3 DistanceReport::*field : {&DistanceReport::m_diag, &DistanceReport::n_diag, &DistanceReport::lambda_a,
                                        &DistanceReport::lambda_b})
        d = std::max(d, max_abs_diff(a.*field, b.*field));
    if (a.degenerate_a != b.degenerate_a || a.degenerate_b != b.degenerate_b ||
        a.theta_E_degenerate != b.theta_E_degenerate || a.theta_C_degenerate != b.theta_C_degenerate)
        d = 1e300;
    return d;
}

void rotation_invariance() {
    std::mt19937_64 rng(4242);
    double worst_report = 0, worst_feature = 0;
    for (int n = 0; n < 1000; ++n) {
        const SymMat3 a = random_symmetric(rng), b = random_symmetric(rng);
        const Rotation3 q = random_rotation(rng);
        const auto r0 = distance_report(a, b);
        const auto r1 = distance_report(conjugate(q.matrix(), a), conjugate(q.matrix(), b));
        worst_report = std::max(worst_report, report_diff(r0, r1));

        const SpectralSignature sig = random_signature(rng, 4);
        const SpectralSignature rot = rotate_signature(sig, random_rotation(rng));
        const auto f0 = build_feature_vector(sig, sig.omega);
        const auto f1 = build_feature_vector(rot, rot.omega);
        for (std::size_t k = 0; k < f0.size(); ++k) worst_feature = std::max(worst_feature, std::abs(f0[k] - f1[k]));
    }
    report("rotation_invariance", worst_report <= 1e-9 && worst_feature <= 1e-9,
           fmt("n=1000 max_report_field_change=%.2e max_feature_change=%.2e", worst_report, worst_feature));
}

void bound_sandwich() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> angle(1e-4, 0.05);
    std::size_t order_fail = 0, e_fail = 0, c_fail = 0;
    double oracle_err = 0, lo_e = 1e300, hi_e = -1e300, lo_c = 1e300, hi_c = -1e300;
    for (int n = 0; n < 1000; ++n) {
        const Vec3 la = random_spectrum(rng, -3, 3, 0.3), lb = random_spectrum(rng, -3, 3, 0.3);
        EigenDecomp ea;
        ea.lambda = la;
        ea.q = random_rotation(rng).matrix();
        const double theta = angle(rng);
        const SymMat3 a = ea.reconstruct();
        EigenDecomp eb = ea;
        eb.lambda = lb;
        const SymMat3 b = rotate_in_eigenframe(eb, AxisAngle::make(random_unit_vector(rng), theta));
        const auto r = distance_report(a, b);
        oracle_err = std::max(oracle_err, std::abs(r.d_riemann - theta) / theta);
        // Consistent bracket for d_E: the θ² coefficient of the expansion is 2kᵀMk.
        const double e_lb = theta_from_dE(a, b, Bound::lower, Normalisation::second_order).value;
        const double e_ub = theta_from_dE(a, b, Bound::upper, Normalisation::second_order).value;
        if (!(r.theta_E_lb <= r.theta_E_ub) || !(r.theta_C_lb <= r.theta_C_ub)) ++order_fail;
        if (!(theta >= 0.95 * e_lb && theta <= 1.05 * e_ub)) ++e_fail;
        if (!(theta >= 0.95 * r.theta_C_lb && theta <= 1.05 * r.theta_C_ub)) ++c_fail;
        lo_e = std::min(lo_e, theta / e_lb), hi_e = std::max(hi_e, theta / e_ub);
        lo_c = std::min(lo_c, theta / r.theta_C_lb), hi_c = std::max(hi_c, theta / r.theta_C_ub);
    }
    report("bound_sandwich_small_angle", order_fail == 0 && e_fail == 0 && c_fail == 0 && oracle_err <= 1e-6,
           fmt("n=1000 lb>ub=%zu outside_E=%zu outside_C=%zu min(theta/E_lb)=%.4f max(theta/E_ub)=%.4f "
               "min(theta/C_lb)=%.4f max(theta/C_ub)=%.4f oracle_dR_relerr=%.1e",
               order_fail, e_fail, c_fail, lo_e, hi_e, lo_c, hi_c, oracle_err));
}

void perturbation_stability() {
    std::mt19937_64 rng(5);
    std::vector<std::pair<SymMat3, SymMat3>> pairs;
    for (int n = 0; n < 200; ++n) pairs.emplace_back(random_symmetric(rng), random_symmetric(rng));
    const Mat3 q = random_rotation(rng).matrix();
    // near-degenerate and exactly degenerate spectra
    pairs.emplace_back(SymMat3::from_eigen({2, 1 + 1e-9, 1}, q), SymMat3::from_eigen({1, 1, 0.5}, Mat3::identity()));
    pairs.emplace_back(SymMat3::from_eigen({1, 1, 1}, q), SymMat3::diag(1, 2, 3));
    pairs.emplace_back(fig2_matrix(1e-6), SymMat3::diag(1, 2, 3));
    pairs.emplace_back(SymMat3::from_eigen({3, 1e-7, 0}, q), SymMat3::from_eigen({1, 1 - 1e-7, -1}, q));

    double worst = 0;
    for (const auto& [a, b] : pairs) {
        SymMat3 ea = random_symmetric(rng), eb = random_symmetric(rng);
        ea = (1.0 / frobenius_norm(ea)) * ea;
        eb = (1.0 / frobenius_norm(eb)) * eb;
        const auto d0 = d_E_pm(a, b);
        const double c0 = d_commutator(a, b);
        for (int p = 2; p <= 8; ++p) {
            const double eps = std::pow(10.0, -p);
            const SymMat3 ap = a + eps * ea, bp = b + eps * eb;
            const auto d1 = d_E_pm(ap, bp);
            worst = std::max({worst, std::abs(d1.d_plus - d0.d_plus) / eps, std::abs(d1.d_minus - d0.d_minus) / eps,
                              std::abs(d_commutator(ap, bp) - c0) / eps});
        }
    }
    report("perturbation_stability", worst < 50.0,
           fmt("pairs=%zu eps=1e-2..1e-8 max_ratio=%.3f (limit 50)", pairs.size(), worst));
}

void commutator_signature_check() {
    std::mt19937_64 rng(31);
    double worst = 0, worst_kernel = 0;
    for (int n = 0; n < 100; ++n) {
        const SpectralSignature sig = random_signature(rng, 10);
        const SignatureCurves c = commutator_signature(sig);
        for (std::size_t k = 0; k < sig.size(); ++k) {
            const auto z = commutators_at(sig, k);
            const double lhs = frobenius_norm(z.ztilde - z.z - z.z0);
            const double scale = frobenius_norm(z.z) + frobenius_norm(z.z0);
            worst = std::max(worst, scale > 0 ? lhs / scale : lhs);
            worst_kernel = std::max({worst_kernel, std::abs(c.z_norm[k] - frobenius_norm(z.z)),
                                     std::abs(c.z0_norm[k] - frobenius_norm(z.z0)),
                                     std::abs(c.ztilde_norm[k] - frobenius_norm(z.ztilde))});
        }
    }
    const SpectralSignature lin = linear_signature(random_symmetric(rng), random_symmetric(rng), random_symmetric(rng),
                                                   1e-4, 1e-1, 25);
    const double slope = scaling_exponent(commutator_signature(lin), CurveField::z_norm, 1e-4, 1e-1);
    report("commutator_identity_and_rate", worst <= 1e-12 && worst_kernel <= 1e-12 && slope >= 0.9 && slope <= 1.1,
           fmt("max_rel|Zt-Z-Z0|=%.2e kernel_norm_diff=%.2e slope=%.6f", worst, worst_kernel, slope));
}

void pipeline() {
    const Dataset raw = gaussian_cluster_dataset(5, 200, 10, 14, 6.0, 2024);
    const ReducedBasis basis = fit_reducer(raw, 1e-9);
    const auto [train_set, test_set] = split(reduce(basis, raw), 2024);
    const LogRegModel model = train(train_set);
    const Evaluation ev = evaluate(model, test_set);
    double worst_off = 0;
    for (std::size_t c = 0; c < ev.confusion.size(); ++c) {
        std::size_t row = 0;
        for (std::size_t v : ev.confusion[c]) row += v;
        worst_off = std::max(worst_off, 1.0 - static_cast<double>(ev.confusion[c][c]) / static_cast<double>(row));
    }

    const ReducedBasis rank5 = fit_reducer(low_rank_dataset(200, 14, 5, 1e-12, 7), 1e-9);

    std::vector<double> pooled;
    for (std::size_t n = 0; n < test_set.size(); ++n) {
        const auto draws = predict_distribution(model, test_set.x[n], 200, 1000 + n);
        const auto& mine = draws[test_set.labels[n]];
        pooled.insert(pooled.end(), mine.begin(), mine.end());
    }
    std::sort(pooled.begin(), pooled.end());
    const double median = pooled[pooled.size() / 2];
    const double above = static_cast<double>(pooled.end() - std::upper_bound(pooled.begin(), pooled.end(), 0.9)) /
                         static_cast<double>(pooled.size());

    const bool ok = ev.accuracy >= 0.95 && worst_off <= 0.1 && rank5.rank() == 5 && basis.rank() == 10 && median > 0.9;
    report("pipeline_synthetic", ok,
           fmt("train=%zu test=%zu G=%zu accuracy=%.4f worst_row_offdiag=%.3f rank5_G=%zu "
               "laplace_correct_median=%.4f frac>0.9=%.3f",
               train_set.size(), test_set.size(), basis.rank(), ev.accuracy, worst_off, rank5.rank(), median, above));
}

}  // namespace

int main() {
    const std::pair<const char*, void (*)()> checks[] = {
        {"fig1_reproduction", fig1},
        {"fig2_qualitative", fig2},
        {"solver_oracle_equivalence", solver_equivalence},
        {"hoffman_wielandt_sandwich", hoffman_wielandt},
        {"rotation_invariance", rotation_invariance},
        {"bound_sandwich_small_angle", bound_sandwich},
        {"perturbation_stability", perturbation_stability},
        {"commutator_identity_and_rate", commutator_signature_check},
        {"pipeline_synthetic", pipeline},
    };
    for (const auto& [name, fn] : checks) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(name, false, std::string("exception: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, std::size(checks));
    return failures == 0 ? 0 : 1;
}
