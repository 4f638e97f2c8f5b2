#include "commdist/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <json.hpp>

#include "commdist/error.hpp"
#include "commdist/semimetrics.hpp"
#include "textio.hpp"

namespace commdist {

namespace {

using json = nlohmann::json;

std::size_t find_frequency(const SpectralSignature& sig, double w, double tol) {
    for (std::size_t k = 0; k < sig.size(); ++k)
        if (std::abs(sig.omega[k] - w) <= tol * std::max(std::abs(w), std::abs(sig.omega[k]))) return k;
    throw Error(ErrorKind::MissingFrequency,
                "omega = " + textio::format_double(w) + " not in signature '" + sig.object_id + "'");
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t n) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

Invariants principal_invariants(const SymMat3& a) noexcept {
    const double tr = a.trace();
    // tr(A²) for symmetric A is the squared Frobenius norm.
    const double tr2 = a.a11 * a.a11 + a.a22 * a.a22 + a.a33 * a.a33 +
                       2 * (a.a12 * a.a12 + a.a13 * a.a13 + a.a23 * a.a23);
    return {tr, 0.5 * (tr * tr - tr2), a.determinant()};
}

FeatureVector build_feature_vector(const SpectralSignature& sig, std::span<const double> frequencies,
                                   const FeatureOptions& opts) {
    const std::size_t m_count = frequencies.size();
    FeatureVector x(7 * m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        const std::size_t k = find_frequency(sig, frequencies[m], opts.match_tol);
        if (is_excluded(sig, TensorPair::Rtilde_I, k, opts.tol_gap))
            throw Error(ErrorKind::ExcludedFrequency, "omega = " + textio::format_double(sig.omega[k]) +
                                                          " has a repeated eigenvalue in '" + sig.object_id + "'");
        const SymMat3 rt = sig.rtilde(k);
        const Invariants ir = principal_invariants(rt);
        const Invariants ii = principal_invariants(sig.i[k]);
        x[m] = ir.i1;
        x[m_count + m] = ir.i2;
        x[2 * m_count + m] = ir.i3;
        x[3 * m_count + m] = ii.i1;
        x[4 * m_count + m] = ii.i2;
        x[5 * m_count + m] = ii.i3;
        const ThetaEstimate th = theta_from_dE(rt, sig.i[k], Bound::lower, Normalisation::published);
        if (!std::isfinite(th.value))
            throw Error(ErrorKind::ExcludedFrequency, "angle estimate undefined at omega = " +
                                                          textio::format_double(sig.omega[k]));
        x[6 * m_count + m] = th.value;
    }
    return x;
}

ClassEncoding ClassEncoding::one_hot(std::size_t index, std::size_t classes) {
    if (index >= classes)
        throw Error(ErrorKind::SchemaError,
                    "class index " + std::to_string(index) + " out of range for " + std::to_string(classes) + " classes");
    ClassEncoding e;
    e.t.assign(classes, 0.0);
    e.t[index] = 1.0;
    return e;
}

std::size_t ClassEncoding::index() const {
    const auto it = std::find(t.begin(), t.end(), 1.0);
    if (it == t.end()) throw Error(ErrorKind::SchemaError, "encoding is not one-hot");
    return static_cast<std::size_t>(it - t.begin());
}

std::uint64_t ReducedBasis::hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const std::int64_t dims[2] = {u.rows(), u.cols()};
    fnv1a(h, dims, sizeof dims);
    fnv1a(h, u.data(), sizeof(double) * static_cast<std::size_t>(u.size()));
    fnv1a(h, sigma.data(), sizeof(double) * static_cast<std::size_t>(sigma.size()));
    return h;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(classes(), 0);
    for (std::size_t l : labels)
        if (l < counts.size()) ++counts[l];
    return counts;
}

void Dataset::validate() const {
    if (labels.size() != x.size())
        throw Error(ErrorKind::DimensionMismatch, std::to_string(x.size()) + " samples but " +
                                                      std::to_string(labels.size()) + " labels");
    for (std::size_t n = 0; n < x.size(); ++n) {
        if (x[n].size() != dim())
            throw Error(ErrorKind::DimensionMismatch, "sample " + std::to_string(n) + " has length " +
                                                          std::to_string(x[n].size()) + ", expected " +
                                                          std::to_string(dim()));
        if (labels[n] >= classes())
            throw Error(ErrorKind::SchemaError, "sample " + std::to_string(n) + " has invalid class index");
    }
}

Eigen::MatrixXd Dataset::matrix() const {
    Eigen::MatrixXd d(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(size()));
    for (std::size_t n = 0; n < size(); ++n)
        d.col(static_cast<Eigen::Index>(n)) = Eigen::Map<const Eigen::VectorXd>(x[n].data(), d.rows());
    return d;
}

ReducedBasis fit_reducer(const Dataset& data, double truncation_ratio) {
    data.validate();
    if (data.size() < 2) throw Error(ErrorKind::TooFewSamples, "need at least 2 samples to fit a reducer");
    if (!(truncation_ratio > 0 && truncation_ratio < 1))
        throw Error(ErrorKind::SchemaError, "truncation ratio must lie in (0, 1)");
    const Eigen::MatrixXd d = data.matrix();
    if (!d.allFinite()) throw Error(ErrorKind::NonFinite, "feature matrix has non-finite entries");
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.size() == 0 || !(s(0) > 0)) throw Error(ErrorKind::DegenerateData, "largest singular value is zero");
    Eigen::Index g = 0;
    while (g < s.size() && s(g) / s(0) > truncation_ratio) ++g;
    ReducedBasis b;
    b.u = svd.matrixU().leftCols(g);
    b.sigma = s.head(g);
    b.truncation_ratio = truncation_ratio;
    return b;
}

std::vector<double> reduce(const ReducedBasis& basis, std::span<const double> x) {
    if (x.size() != basis.features())
        throw Error(ErrorKind::DimensionMismatch, "feature vector has length " + std::to_string(x.size()) +
                                                      ", basis expects " + std::to_string(basis.features()));
    const Eigen::VectorXd r = basis.u.transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), basis.u.rows());
    return {r.data(), r.data() + r.size()};
}

Dataset reduce(const ReducedBasis& basis, const Dataset& data) {
    Dataset out;
    out.labels = data.labels;
    out.class_names = data.class_names;
    out.reducer = basis;
    out.x.reserve(data.size());
    for (const auto& v : data.x) out.x.push_back(reduce(basis, v));
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, std::uint64_t seed) {
    data.validate();
    std::vector<std::vector<std::size_t>> by_class(data.classes());
    for (std::size_t n = 0; n < data.size(); ++n) by_class[data.labels[n]].push_back(n);

    std::mt19937_64 rng(seed);
    Dataset train, test;
    for (Dataset* d : {&train, &test}) {
        d->class_names = data.class_names;
        d->reducer = data.reducer;
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        if (idx.size() < 4)
            throw Error(ErrorKind::TooFewSamples, "class '" + data.class_names[c] + "' has " +
                                                      std::to_string(idx.size()) + " samples, need at least 4");
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t n_train = (3 * idx.size() + 3) / 4;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            Dataset& dst = j < n_train ? train : test;
            dst.x.push_back(data.x[idx[j]]);
            dst.labels.push_back(c);
        }
    }
    return {std::move(train), std::move(test)};
}

Standardizer Standardizer::fit(const Dataset& data) {
    data.validate();
    Standardizer s;
    const std::size_t f = data.dim();
    s.mean.assign(f, 0.0);
    s.scale.assign(f, 1.0);
    if (data.size() == 0) return s;
    const double n = static_cast<double>(data.size());
    for (const auto& v : data.x)
        for (std::size_t j = 0; j < f; ++j) s.mean[j] += v[j] / n;
    std::vector<double> var(f, 0.0);
    for (const auto& v : data.x)
        for (std::size_t j = 0; j < f; ++j) var[j] += (v[j] - s.mean[j]) * (v[j] - s.mean[j]) / n;
    // constant features are centred only
    for (std::size_t j = 0; j < f; ++j) s.scale[j] = var[j] > 0 ? std::sqrt(var[j]) : 1.0;
    return s;
}

void Standardizer::apply(Dataset& data) const {
    for (auto& v : data.x) {
        if (v.size() != mean.size())
            throw Error(ErrorKind::DimensionMismatch, "standardizer fitted on a different feature length");
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = (v[j] - mean[j]) / scale[j];
    }
}

Manifest load_manifest(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(textio::read_file(path.string()));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::SchemaError, path.string() + ": invalid JSON: " + e.what());
    }
    const auto need = [&](const char* key) -> const json& {
        if (!j.is_object() || !j.contains(key))
            throw Error(ErrorKind::SchemaError, path.string() + ": missing field '" + key + "'");
        return j[key];
    };
    Manifest m;
    try {
        m.class_names = need("class_names").get<std::vector<std::string>>();
        m.frequencies = need("frequencies").get<std::vector<double>>();
        m.seed = j.value("seed", std::uint64_t{0});
        const auto base = path.parent_path();
        for (const auto& s : need("signatures").get<std::vector<std::string>>()) {
            std::filesystem::path p(s);
            m.signatures.push_back(p.is_absolute() ? p : base / p);
        }
    } catch (const json::type_error& e) {
        throw Error(ErrorKind::SchemaError, path.string() + ": " + e.what());
    }
    if (m.class_names.empty()) throw Error(ErrorKind::SchemaError, path.string() + ": class_names is empty");
    if (m.frequencies.empty()) throw Error(ErrorKind::SchemaError, path.string() + ": frequencies is empty");
    return m;
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
    json j;
    j["class_names"] = m.class_names;
    j["frequencies"] = m.frequencies;
    j["seed"] = m.seed;
    std::vector<std::string> sigs;
    const auto base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    for (const auto& p : m.signatures) {
        std::error_code ec;
        const auto rel = std::filesystem::relative(p, base, ec);
        sigs.push_back((ec || rel.empty() ? p : rel).generic_string());
    }
    j["signatures"] = sigs;
    textio::write_file(path.string(), j.dump(2) + "\n");
}

Dataset build_dataset(const Manifest& manifest, const FeatureOptions& opts) {
    Dataset d;
    d.class_names = manifest.class_names;
    for (const auto& path : manifest.signatures) {
        const SpectralSignature sig = load_signature(path);
        const auto it = std::find(d.class_names.begin(), d.class_names.end(), sig.class_label);
        if (it == d.class_names.end())
            throw Error(ErrorKind::SchemaError,
                        path.string() + ": class_label '" + sig.class_label + "' is not listed in the manifest");
        d.x.push_back(build_feature_vector(sig, manifest.frequencies, opts));
        d.labels.push_back(static_cast<std::size_t>(it - d.class_names.begin()));
    }
    return d;
}

std::string dataset_to_csv(const Dataset& data) {
    data.validate();
    std::ostringstream out;
    for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << j + 1 << ',';
    out << "label\n";
    for (std::size_t n = 0; n < data.size(); ++n) {
        for (double v : data.x[n]) out << textio::format_double(v) << ',';
        out << data.class_names[data.labels[n]] << '\n';
    }
    return out.str();
}

Dataset parse_dataset_csv(std::string_view text, const std::vector<std::string>& class_names) {
    const auto rows = textio::lines(text);
    if (rows.empty()) throw Error(ErrorKind::SchemaError, "dataset CSV is empty");
    const auto header = textio::split(rows[0]);
    if (header.empty() || header.back() != "label")
        throw Error(ErrorKind::SchemaError, "dataset CSV: last header column must be 'label'");
    const std::size_t f = header.size() - 1;
    Dataset d;
    d.class_names = class_names;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (textio::trim(rows[k]).empty()) continue;
        const auto cells = textio::split(rows[k]);
        const std::string where = "dataset CSV line " + std::to_string(k + 1);
        if (cells.size() != f + 1) throw Error(ErrorKind::SchemaError, where + ": wrong field count");
        FeatureVector v(f);
        for (std::size_t j = 0; j < f; ++j) {
            const auto x = textio::parse_double(cells[j]);
            if (!x) throw Error(ErrorKind::SchemaError, where + ": bad number '" + std::string(cells[j]) + "'");
            v[j] = *x;
        }
        const std::string label(cells[f]);
        auto it = std::find(d.class_names.begin(), d.class_names.end(), label);
        if (it == d.class_names.end()) {
            if (!class_names.empty()) throw Error(ErrorKind::SchemaError, where + ": unknown label '" + label + "'");
            d.class_names.push_back(label);
            it = d.class_names.end() - 1;
        }
        d.x.push_back(std::move(v));
        d.labels.push_back(static_cast<std::size_t>(it - d.class_names.begin()));
    }
    return d;
}

SpectralSignature add_gaussian_noise(const SpectralSignature& sig, double level, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SpectralSignature out = sig;
    auto perturb = [&](SymMat3& t) {
        const double s = level * frobenius_norm(t);
        auto c = t.coefficients();
        for (double& v : c) v += s * normal(rng);
        t = SymMat3::from_coefficients(c);
    };
    for (std::size_t k = 0; k < out.size(); ++k) {
        perturb(out.r[k]);
        perturb(out.i[k]);
    }
    return out;
}

}  // namespace commdist
