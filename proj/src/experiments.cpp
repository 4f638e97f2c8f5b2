#include "commdist/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "commdist/error.hpp"
#include "textio.hpp"

namespace commdist {

namespace {

double rel_err(double est, double truth) { return (est - truth) / truth; }

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        g[k] = lo * std::pow(hi / lo, t);
    }
    if (n > 1) g.back() = hi;
    return g;
}

SymMat3 in_frame(const Rotation3& q, const Vec3& lambda) { return SymMat3::from_eigen(lambda, q.matrix()); }

Vec3 scaled(const Vec3& v, double s) { return {s * v[0], s * v[1], s * v[2]}; }

void write_report_cells(std::ostringstream& out, const DistanceReport& r) {
    for (double v : {r.d_riemann, r.d_chordal_scaled, r.theta_E_lb, r.theta_E_ub, r.theta_C_lb, r.theta_C_ub})
        out << ',' << textio::format_double(v);
}

}  // namespace

SymMat3 fig1_matrix() noexcept { return {3, 4, 5, 1, 0.5, 0.25}; }

SymMat3 fig2_matrix(double eps) noexcept { return {1 + eps, 1 - eps, 2, 0.01, 0.01, 0.01}; }

std::vector<Fig1Row> fig1_sweep(double theta_min, double theta_max, std::size_t steps, const ReportOptions& opts) {
    if (steps == 0 || !(theta_max > theta_min) || theta_min < 0)
        throw Error(ErrorKind::SchemaError, "fig1 needs steps ≥ 1 and 0 ≤ theta_min < theta_max");
    const SymMat3 a = fig1_matrix();
    const EigenDecomp ea = eigh3_cardano(a, opts.eigen);
    const double s = 1.0 / std::sqrt(3.0);
    std::vector<Fig1Row> rows;
    rows.reserve(steps);
    for (std::size_t j = 1; j <= steps; ++j) {
        const double theta = theta_min + (theta_max - theta_min) * static_cast<double>(j) / static_cast<double>(steps);
        const SymMat3 b = rotate_in_eigenframe(ea, AxisAngle::make({s, s, s}, theta));
        rows.push_back({theta, distance_report(a, b, opts)});
    }
    return rows;
}

std::vector<Fig2Row> fig2_sweep(double eps_min, double eps_max, std::size_t steps, const ReportOptions& opts) {
    if (steps == 0 || !(eps_min > 0) || !(eps_max >= eps_min))
        throw Error(ErrorKind::SchemaError, "fig2 needs steps ≥ 1 and 0 < eps_min ≤ eps_max");
    const SymMat3 b = SymMat3::diag(1, 2, 3);
    std::vector<Fig2Row> rows;
    for (double eps : log_grid(eps_min, eps_max, steps)) rows.push_back({eps, distance_report(fig2_matrix(eps), b, opts)});
    return rows;
}

std::string fig1_csv(const std::vector<Fig1Row>& rows) {
    std::ostringstream out;
    out << "theta,d_riemann,d_chordal_scaled,theta_E_lb,theta_E_ub,theta_C_lb,theta_C_ub,"
           "relerr_d_riemann,relerr_d_chordal_scaled,relerr_theta_E_lb,relerr_theta_C_lb\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << textio::format_double(row.theta);
        write_report_cells(out, r);
        for (double v : {r.d_riemann, r.d_chordal_scaled, r.theta_E_lb, r.theta_C_lb})
            out << ',' << textio::format_double(rel_err(v, row.theta));
        out << '\n';
    }
    return out.str();
}

std::string fig2_csv(const std::vector<Fig2Row>& rows) {
    std::ostringstream out;
    out << "eps,d_riemann,d_chordal_scaled,theta_E_lb,theta_E_ub,theta_C_lb,theta_C_ub,d_C,d_E_semi\n";
    for (const auto& row : rows) {
        out << textio::format_double(row.eps);
        write_report_cells(out, row.report);
        out << ',' << textio::format_double(row.report.d_C_raw) << ',' << textio::format_double(row.report.d_E_semi)
            << '\n';
    }
    return out.str();
}

Rotation3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    double w, x, y, z, len;
    do {
        w = n(rng), x = n(rng), y = n(rng), z = n(rng);
        len = std::sqrt(w * w + x * x + y * y + z * z);
    } while (len < 1e-8);
    w /= len, x /= len, y /= len, z /= len;
    const Mat3 r{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
                  2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
                  2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
    return Rotation3::unchecked(r);
}

SymMat3 random_symmetric(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    SymMat3 a;
    a.a11 = u(rng), a.a22 = u(rng), a.a33 = u(rng), a.a12 = u(rng), a.a13 = u(rng), a.a23 = u(rng);
    return a;
}

Vec3 random_unit_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const Vec3 v{n(rng), n(rng), n(rng)};
        const double len = norm(v);
        if (len > 1e-8) return {v[0] / len, v[1] / len, v[2] / len};
    }
}

Vec3 random_spectrum(std::mt19937_64& rng, double lo, double hi, double min_gap) {
    if (!(hi - lo >= 2 * min_gap)) throw Error(ErrorKind::SchemaError, "spectrum interval too narrow for the gap");
    // Draw in the shrunken interval, then spread by the gap.
    std::uniform_real_distribution<double> u(lo, hi - 2 * min_gap);
    Vec3 v{u(rng), u(rng), u(rng)};
    std::sort(v.begin(), v.end());
    return {v[2] + 2 * min_gap, v[1] + min_gap, v[0]};
}

SpectralSignature rotate_signature(const SpectralSignature& sig, const Rotation3& q) {
    SpectralSignature out = sig;
    out.n0 = conjugate(q.matrix(), sig.n0);
    for (std::size_t k = 0; k < sig.size(); ++k) {
        out.r[k] = conjugate(q.matrix(), sig.r[k]);
        out.i[k] = conjugate(q.matrix(), sig.i[k]);
    }
    return out;
}

SpectralSignature random_signature(std::mt19937_64& rng, std::size_t n) {
    SpectralSignature sig;
    sig.object_id = "random";
    sig.class_label = "random";
    sig.omega = log_grid(1e2, 1e5, n);
    sig.n0 = random_symmetric(rng);
    for (std::size_t k = 0; k < n; ++k) {
        sig.r.push_back(random_symmetric(rng));
        sig.i.push_back(random_symmetric(rng));
    }
    return sig;
}

SpectralSignature linear_signature(const SymMat3& n0, const SymMat3& r0, const SymMat3& i0, double nu_lo, double nu_hi,
                                   std::size_t n) {
    SpectralSignature sig;
    sig.object_id = "linear";
    sig.class_label = "linear";
    sig.omega = log_grid(nu_lo, nu_hi, n);
    sig.n0 = n0;
    for (double nu : sig.omega) {
        sig.r.push_back(r0);
        sig.i.push_back(nu * i0);
    }
    return sig;
}

SpectralSignature crossing_signature(std::size_t n) {
    SpectralSignature sig;
    sig.object_id = "crossing";
    sig.class_label = "crossing";
    sig.omega = log_grid(1e2, 1e4, n);
    const Mat3 q = rodrigues_exp(AxisAngle::make({1, 2, 3}, 0.7)).matrix();
    sig.n0 = SymMat3::diag(2.0, 1.5, 1.0);
    const SymMat3 r = SymMat3::from_eigen({-0.2, -0.5, -0.9}, rodrigues_exp(AxisAngle::make({0, 1, 0}, 0.3)).matrix());
    for (std::size_t k = 0; k < n; ++k) {
        const double t = n == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(n - 1);
        // Small off-diagonal coupling keeps I non-commuting with R across the sweep.
        const Vec3 lam{1.0 + 2.0 * t, 2.0, 3.0 - 2.0 * t};
        sig.r.push_back(r);
        sig.i.push_back(conjugate(q, SymMat3::diag(lam[0], lam[1], lam[2])));
    }
    return sig;
}

Dataset gaussian_cluster_dataset(std::size_t classes, std::size_t per_class, std::size_t dim, std::size_t features,
                                 double separation, std::uint64_t seed) {
    if (classes > dim || dim > features)
        throw Error(ErrorKind::SchemaError, "gaussian clusters need classes ≤ dim ≤ features");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd g(static_cast<Eigen::Index>(features), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = n(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd embed = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());

    Dataset d;
    for (std::size_t c = 0; c < classes; ++c) d.class_names.push_back("class" + std::to_string(c));
    // Scaled basis vectors: every pair of means is `separation` apart.
    const double offset = separation / std::numbers::sqrt2;
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t s = 0; s < per_class; ++s) {
            Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
            for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = n(rng);
            z(static_cast<Eigen::Index>(c)) += offset;
            const Eigen::VectorXd x = embed * z;
            d.x.emplace_back(x.data(), x.data() + x.size());
            d.labels.push_back(c);
        }
    }
    return d;
}

Dataset low_rank_dataset(std::size_t samples, std::size_t features, std::size_t rank, double noise,
                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd u(static_cast<Eigen::Index>(features), static_cast<Eigen::Index>(rank));
    Eigen::MatrixXd v(static_cast<Eigen::Index>(rank), static_cast<Eigen::Index>(samples));
    for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = n(rng);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = n(rng);
    Eigen::MatrixXd d = u * v;
    for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] += noise * n(rng);
    Dataset out;
    out.class_names = {"all"};
    for (Eigen::Index c = 0; c < d.cols(); ++c) {
        out.x.emplace_back(d.col(c).data(), d.col(c).data() + d.rows());
        out.labels.push_back(0);
    }
    return out;
}

std::vector<SpectralSignature> synthetic_library(const SynthLibraryOptions& opts, std::vector<double>* selected) {
    if (opts.classes == 0 || opts.per_class == 0 || opts.frequencies == 0 || opts.selected == 0 ||
        opts.selected > opts.frequencies)
        throw Error(ErrorKind::SchemaError, "synthetic library needs positive counts and selected ≤ frequencies");
    constexpr double omega0 = 1e4;
    const std::vector<double> omega = log_grid(0.1 * omega0, 10 * omega0, opts.frequencies);
    if (selected) {
        selected->clear();
        const std::size_t stride = opts.frequencies / opts.selected;
        for (std::size_t m = 0; m < opts.selected; ++m) selected->push_back(omega[m * stride]);
    }

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<SpectralSignature> out;
    for (std::size_t c = 0; c < opts.classes; ++c) {
        const double scale = 1.0 + 0.35 * static_cast<double>(c);
        const double tilt = 0.05 + 0.05 * static_cast<double>(c);
        const Rotation3 rel = rodrigues_exp(AxisAngle::make(random_unit_vector(rng), tilt));
        for (std::size_t s = 0; s < opts.per_class; ++s) {
            const Rotation3 g = random_rotation(rng);
            const Rotation3 gi = g * rel;
            const double jn = 1 + opts.jitter * n(rng), jr = 1 + opts.jitter * n(rng), ji = 1 + opts.jitter * n(rng);
            SpectralSignature sig;
            sig.object_id = "c" + std::to_string(c) + "_" + std::to_string(s);
            sig.class_label = "class" + std::to_string(c);
            sig.alpha = 0.01;
            sig.omega = omega;
            sig.n0 = in_frame(g, scaled({1.0, 0.7, 0.4}, scale * jn));
            for (double w : omega) {
                const double x = w / omega0;
                const double fr = x * x / (1 + x * x), fi = x / (1 + x * x);
                sig.r.push_back(in_frame(g, scaled({-1.0, -0.55, -0.25}, 0.3 * scale * jr * fr)));
                sig.i.push_back(in_frame(gi, scaled({1.0, 0.6, 0.3}, 0.5 * scale * ji * fi)));
            }
            out.push_back(std::move(sig));
        }
    }
    return out;
}

Manifest write_synthetic_library(const std::filesystem::path& dir, const SynthLibraryOptions& opts) {
    std::filesystem::create_directories(dir);
    Manifest m;
    m.seed = opts.seed;
    for (std::size_t c = 0; c < opts.classes; ++c) m.class_names.push_back("class" + std::to_string(c));
    const auto sigs = synthetic_library(opts, &m.frequencies);
    const char* ext = opts.format == SignatureFormat::json ? ".json" : ".csv";
    for (const auto& sig : sigs) {
        const auto path = dir / (sig.object_id + ext);
        save_signature(sig, path, opts.format);
        m.signatures.push_back(path);
    }
    save_manifest(m, dir / "manifest.json");
    return m;
}

}  // namespace commdist
