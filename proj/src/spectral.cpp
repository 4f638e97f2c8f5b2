#include "commdist/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "commdist/error.hpp"
#include "textio.hpp"

namespace commdist {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::array<const char*, 6> kSuffix{"11", "22", "33", "12", "13", "23"};

std::vector<std::string> signature_header() {
    std::vector<std::string> h{"omega"};
    for (const char* t : {"n0", "r", "i"})
        for (const char* s : kSuffix) h.push_back(std::string(t) + "_" + s);
    return h;
}

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

void apply_metadata(SpectralSignature& sig, const std::string& key, const std::string& value) {
    if (key == "object_id") {
        sig.object_id = value;
    } else if (key == "class_label") {
        sig.class_label = value;
    } else if (key == "alpha") {
        const auto v = textio::parse_double(value);
        if (!v) schema_error("metadata alpha: not a number '" + value + "'");
        sig.alpha = *v;
    } else {
        sig.metadata[key] = value;
    }
}

std::string json_scalar_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return textio::format_double(v.get<double>());
    return v.dump();
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".meta.json");
    return p;
}

SymMat3 sym_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 6) schema_error(where + ": expected an array of 6 coefficients");
    std::array<double, 6> c{};
    for (std::size_t k = 0; k < 6; ++k) {
        if (!j[k].is_number()) schema_error(where + "[" + std::to_string(k) + "]: not a number");
        c[k] = j[k].get<double>();
    }
    return SymMat3::from_coefficients(c);
}

json sym_to_json(const SymMat3& a) {
    const auto c = a.coefficients();
    return json(std::vector<double>(c.begin(), c.end()));
}

SymMat3 first_tensor(const SpectralSignature& sig, TensorPair pair, std::size_t k) noexcept {
    switch (pair) {
        case TensorPair::R_I: return sig.r[k];
        case TensorPair::N0_I: return sig.n0;
        case TensorPair::Rtilde_I: return sig.rtilde(k);
    }
    return sig.r[k];
}

std::string cell(double v) { return std::isnan(v) ? std::string() : textio::format_double(v); }

}  // namespace

void SpectralSignature::validate() const {
    if (omega.empty()) schema_error("signature has no frequencies");
    if (r.size() != omega.size() || i.size() != omega.size())
        schema_error("omega, r and i lengths differ (" + std::to_string(omega.size()) + ", " +
                     std::to_string(r.size()) + ", " + std::to_string(i.size()) + ")");
    if (!n0.is_finite()) schema_error("n0 has non-finite entries");
    for (std::size_t k = 0; k < omega.size(); ++k) {
        if (!std::isfinite(omega[k])) schema_error("omega[" + std::to_string(k) + "] is not finite");
        if (!r[k].is_finite()) schema_error("r[" + std::to_string(k) + "] has non-finite entries");
        if (!i[k].is_finite()) schema_error("i[" + std::to_string(k) + "] has non-finite entries");
        if (k > 0 && !(omega[k] > omega[k - 1]))
            throw Error(ErrorKind::NonMonotoneFrequency, "omega[" + std::to_string(k) + "] = " +
                                                             textio::format_double(omega[k]) +
                                                             " does not exceed its predecessor");
    }
}

SignatureFormat format_from_path(const std::filesystem::path& path) noexcept {
    return path.extension() == ".json" ? SignatureFormat::json : SignatureFormat::csv;
}

SpectralSignature parse_signature_csv(std::string_view text) {
    SpectralSignature sig;
    const auto rows = textio::lines(text);
    const auto header = signature_header();
    std::size_t k = 0;
    bool have_header = false;
    for (; k < rows.size(); ++k) {
        const auto line = textio::trim(rows[k]);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto body = textio::trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;  // plain comment
            apply_metadata(sig, std::string(textio::trim(body.substr(0, eq))),
                           std::string(textio::trim(body.substr(eq + 1))));
            continue;
        }
        const auto cols = textio::split(line);
        if (cols.size() != header.size()) schema_error("line " + std::to_string(k + 1) + ": header has " +
                                                       std::to_string(cols.size()) + " columns, expected " +
                                                       std::to_string(header.size()));
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (cols[c] != header[c])
                schema_error("line " + std::to_string(k + 1) + ": column " + std::to_string(c + 1) + " is '" +
                             std::string(cols[c]) + "', expected '" + header[c] + "'");
        have_header = true;
        ++k;
        break;
    }
    if (!have_header) schema_error("missing header row");

    std::array<double, 6> n0_first{};
    for (; k < rows.size(); ++k) {
        const auto line = textio::trim(rows[k]);
        if (line.empty() || line.front() == '#') continue;
        const auto cols = textio::split(line);
        const std::string where = "line " + std::to_string(k + 1);
        if (cols.size() != header.size())
            schema_error(where + ": " + std::to_string(cols.size()) + " fields, expected " +
                         std::to_string(header.size()));
        std::array<double, 19> v{};
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto d = textio::parse_double(cols[c]);
            if (!d || !std::isfinite(*d))
                schema_error(where + ", field " + header[c] + ": invalid number '" + std::string(cols[c]) + "'");
            v[c] = *d;
        }
        std::array<double, 6> n0c{}, rc{}, ic{};
        std::copy_n(v.begin() + 1, 6, n0c.begin());
        std::copy_n(v.begin() + 7, 6, rc.begin());
        std::copy_n(v.begin() + 13, 6, ic.begin());
        if (sig.omega.empty()) {
            n0_first = n0c;
            sig.n0 = SymMat3::from_coefficients(n0c);
        } else {
            double diff = 0, ref = 0;
            for (std::size_t c = 0; c < 6; ++c) {
                diff = std::max(diff, std::abs(n0c[c] - n0_first[c]));
                ref = std::max(ref, std::abs(n0_first[c]));
            }
            if (diff > 1e-12 * ref)
                schema_error(where + ": n0 columns differ from the first row by " + textio::format_double(diff));
        }
        sig.omega.push_back(v[0]);
        sig.r.push_back(SymMat3::from_coefficients(rc));
        sig.i.push_back(SymMat3::from_coefficients(ic));
    }
    sig.validate();
    return sig;
}

std::string signature_to_csv(const SpectralSignature& sig) {
    std::ostringstream out;
    if (!sig.object_id.empty()) out << "# object_id=" << sig.object_id << '\n';
    if (!sig.class_label.empty()) out << "# class_label=" << sig.class_label << '\n';
    if (sig.alpha) out << "# alpha=" << textio::format_double(*sig.alpha) << '\n';
    for (const auto& [key, value] : sig.metadata) out << "# " << key << '=' << value << '\n';
    const auto header = signature_header();
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    const auto n0 = sig.n0.coefficients();
    for (std::size_t k = 0; k < sig.size(); ++k) {
        out << textio::format_double(sig.omega[k]);
        for (double v : n0) out << ',' << textio::format_double(v);
        for (double v : sig.r[k].coefficients()) out << ',' << textio::format_double(v);
        for (double v : sig.i[k].coefficients()) out << ',' << textio::format_double(v);
        out << '\n';
    }
    return out.str();
}

SpectralSignature parse_signature_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        schema_error(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) schema_error("top-level JSON value must be an object");
    SpectralSignature sig;
    if (j.contains("object_id")) sig.object_id = json_scalar_to_string(j["object_id"]);
    if (j.contains("class_label")) sig.class_label = json_scalar_to_string(j["class_label"]);
    if (j.contains("alpha") && !j["alpha"].is_null()) {
        if (!j["alpha"].is_number()) schema_error("alpha: not a number");
        sig.alpha = j["alpha"].get<double>();
    }
    if (j.contains("metadata")) {
        if (!j["metadata"].is_object()) schema_error("metadata: expected an object");
        for (const auto& [key, value] : j["metadata"].items()) sig.metadata[key] = json_scalar_to_string(value);
    }
    for (const char* key : {"omega", "n0", "r", "i"})
        if (!j.contains(key)) schema_error(std::string("missing field '") + key + "'");
    if (!j["omega"].is_array()) schema_error("omega: expected an array");
    for (std::size_t k = 0; k < j["omega"].size(); ++k) {
        if (!j["omega"][k].is_number()) schema_error("omega[" + std::to_string(k) + "]: not a number");
        sig.omega.push_back(j["omega"][k].get<double>());
    }
    sig.n0 = sym_from_json(j["n0"], "n0");
    for (const char* key : {"r", "i"}) {
        if (!j[key].is_array()) schema_error(std::string(key) + ": expected an array");
        auto& dst = key[0] == 'r' ? sig.r : sig.i;
        for (std::size_t k = 0; k < j[key].size(); ++k)
            dst.push_back(sym_from_json(j[key][k], std::string(key) + "[" + std::to_string(k) + "]"));
    }
    sig.validate();
    return sig;
}

std::string signature_to_json(const SpectralSignature& sig) {
    json j;
    j["object_id"] = sig.object_id;
    j["class_label"] = sig.class_label;
    j["alpha"] = sig.alpha ? json(*sig.alpha) : json(nullptr);
    j["metadata"] = json::object();
    for (const auto& [key, value] : sig.metadata) j["metadata"][key] = value;
    j["omega"] = sig.omega;
    j["n0"] = sym_to_json(sig.n0);
    j["r"] = json::array();
    j["i"] = json::array();
    for (const auto& a : sig.r) j["r"].push_back(sym_to_json(a));
    for (const auto& a : sig.i) j["i"].push_back(sym_to_json(a));
    return j.dump(2) + "\n";
}

SpectralSignature load_signature(const std::filesystem::path& path, SignatureFormat format) {
    const std::string text = textio::read_file(path.string());
    try {
        if (format == SignatureFormat::json) return parse_signature_json(text);
        SpectralSignature sig = parse_signature_csv(text);
        const auto side = sidecar_path(path);
        if (std::filesystem::exists(side)) {
            json j;
            try {
                j = json::parse(textio::read_file(side.string()));
            } catch (const json::parse_error& e) {
                schema_error(side.string() + ": invalid JSON: " + e.what());
            }
            if (!j.is_object()) schema_error(side.string() + ": expected an object");
            for (const auto& [key, value] : j.items()) apply_metadata(sig, key, json_scalar_to_string(value));
        }
        return sig;
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

void save_signature(const SpectralSignature& sig, const std::filesystem::path& path, SignatureFormat format) {
    textio::write_file(path.string(), format == SignatureFormat::json ? signature_to_json(sig) : signature_to_csv(sig));
}

CommutatorSample commutators_at(const SpectralSignature& sig, std::size_t k) noexcept {
    return {commutator(sig.r[k], sig.i[k]), commutator(sig.n0, sig.i[k]), commutator(sig.rtilde(k), sig.i[k])};
}

TensorPair parse_tensor_pair(std::string_view name) {
    if (name == "R_I") return TensorPair::R_I;
    if (name == "N0_I") return TensorPair::N0_I;
    if (name == "Rtilde_I") return TensorPair::Rtilde_I;
    schema_error("unknown tensor pair '" + std::string(name) + "' (expected R_I, N0_I or Rtilde_I)");
}

const char* to_string(TensorPair pair) noexcept {
    switch (pair) {
        case TensorPair::R_I: return "R_I";
        case TensorPair::N0_I: return "N0_I";
        case TensorPair::Rtilde_I: return "Rtilde_I";
    }
    return "?";
}

SignatureCurves commutator_signature(const SpectralSignature& sig, kernels::Isa isa) {
    const std::size_t n = sig.size();
    std::vector<SymMat3> n0s(n, sig.n0), rt(n);
    for (std::size_t k = 0; k < n; ++k) rt[k] = sig.rtilde(k);
    const kernels::SymBatch bi(sig.i);

    SignatureCurves c;
    c.omega = sig.omega;
    c.z_norm.resize(n);
    c.z0_norm.resize(n);
    c.ztilde_norm.resize(n);
    kernels::commutator_norms(kernels::SymBatch(sig.r), bi, c.z_norm, isa);
    kernels::commutator_norms(kernels::SymBatch(n0s), bi, c.z0_norm, isa);
    kernels::commutator_norms(kernels::SymBatch(rt), bi, c.ztilde_norm, isa);
    for (auto* v : {&c.theta_E, &c.theta_C, &c.d_riemann, &c.d_chordal_scaled}) v->assign(n, kNaN);
    c.excluded.assign(n, false);
    return c;
}

bool is_excluded(const SpectralSignature& sig, TensorPair pair, std::size_t k, double tol) {
    return min_relative_gap(eigenvalues(first_tensor(sig, pair, k))) < tol ||
           min_relative_gap(eigenvalues(sig.i[k])) < tol;
}

SignatureCurves distance_signature(const SpectralSignature& sig, TensorPair pair,
                                   const DistanceSignatureOptions& opts) {
    SignatureCurves c = commutator_signature(sig);
    ReportOptions ropts;
    ropts.degeneracy_tol = opts.tol_gap;
    ropts.eigen = opts.eigen;
    for (std::size_t k = 0; k < sig.size(); ++k) {
        if (is_excluded(sig, pair, k, opts.tol_gap)) {
            c.excluded[k] = true;
            continue;
        }
        const DistanceReport r = distance_report(first_tensor(sig, pair, k), sig.i[k], ropts);
        c.d_riemann[k] = r.d_riemann;
        c.d_chordal_scaled[k] = r.d_chordal_scaled;
        c.theta_E[k] = opts.bound == Bound::lower ? r.theta_E_lb : r.theta_E_ub;
        c.theta_C[k] = opts.bound == Bound::lower ? r.theta_C_lb : r.theta_C_ub;
    }
    return c;
}

CurveField parse_curve_field(std::string_view name) {
    if (name == "z_norm") return CurveField::z_norm;
    if (name == "z0_norm") return CurveField::z0_norm;
    if (name == "ztilde_norm") return CurveField::ztilde_norm;
    if (name == "theta_E") return CurveField::theta_E;
    if (name == "theta_C") return CurveField::theta_C;
    if (name == "d_riemann") return CurveField::d_riemann;
    if (name == "d_chordal_scaled") return CurveField::d_chordal_scaled;
    schema_error("unknown curve field '" + std::string(name) + "'");
}

const std::vector<double>& curve_values(const SignatureCurves& c, CurveField field) noexcept {
    switch (field) {
        case CurveField::z_norm: return c.z_norm;
        case CurveField::z0_norm: return c.z0_norm;
        case CurveField::ztilde_norm: return c.ztilde_norm;
        case CurveField::theta_E: return c.theta_E;
        case CurveField::theta_C: return c.theta_C;
        case CurveField::d_riemann: return c.d_riemann;
        case CurveField::d_chordal_scaled: return c.d_chordal_scaled;
    }
    return c.z_norm;
}

double scaling_exponent(const SignatureCurves& curves, CurveField field, double omega_lo, double omega_hi) {
    const auto& values = curve_values(curves, field);
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const double w = curves.omega[k], v = values[k];
        if (w < omega_lo || w > omega_hi || !(w > 0) || !(v > 0) || !std::isfinite(v)) continue;
        xs.push_back(std::log(w));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 3)
        throw Error(ErrorKind::InsufficientSamples,
                    std::to_string(xs.size()) + " usable samples in range, need at least 3");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    if (!(sxx > 0)) throw Error(ErrorKind::InsufficientSamples, "all usable samples share one frequency");
    return sxy / sxx;
}

std::string curves_to_csv(const SignatureCurves& c) {
    std::ostringstream out;
    out << "omega,z_norm,z0_norm,ztilde_norm,d_riemann,d_chordal_scaled,theta_E,theta_C,excluded\n";
    for (std::size_t k = 0; k < c.size(); ++k) {
        out << textio::format_double(c.omega[k]) << ',' << cell(c.z_norm[k]) << ',' << cell(c.z0_norm[k]) << ','
            << cell(c.ztilde_norm[k]) << ',' << cell(c.d_riemann[k]) << ',' << cell(c.d_chordal_scaled[k]) << ','
            << cell(c.theta_E[k]) << ',' << cell(c.theta_C[k]) << ',' << (c.excluded[k] ? 1 : 0) << '\n';
    }
    return out.str();
}

SignatureCurves parse_curves_csv(std::string_view text) {
    const auto rows = textio::lines(text);
    if (rows.empty() ||
        textio::trim(rows[0]) != "omega,z_norm,z0_norm,ztilde_norm,d_riemann,d_chordal_scaled,theta_E,theta_C,excluded")
        schema_error("curves CSV: unexpected header");
    SignatureCurves c;
    std::array<std::vector<double>*, 8> cols{&c.omega,     &c.z_norm,          &c.z0_norm, &c.ztilde_norm,
                                             &c.d_riemann, &c.d_chordal_scaled, &c.theta_E, &c.theta_C};
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (textio::trim(rows[k]).empty()) continue;
        const auto f = textio::split(rows[k]);
        if (f.size() != 9) schema_error("curves CSV line " + std::to_string(k + 1) + ": expected 9 fields");
        for (std::size_t j = 0; j < 8; ++j) {
            if (f[j].empty() && j >= 1) {
                cols[j]->push_back(kNaN);
                continue;
            }
            const auto v = textio::parse_double(f[j]);
            if (!v) schema_error("curves CSV line " + std::to_string(k + 1) + ": bad number '" + std::string(f[j]) + "'");
            cols[j]->push_back(*v);
        }
        if (f[8] != "0" && f[8] != "1") schema_error("curves CSV line " + std::to_string(k + 1) + ": excluded must be 0 or 1");
        c.excluded.push_back(f[8] == "1");
    }
    return c;
}

}  // namespace commdist
