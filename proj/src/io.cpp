#include "commdist/io.hpp"

#include <cmath>
#include <limits>

#include "commdist/error.hpp"
#include "textio.hpp"

namespace commdist {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

double number(const json& v, const std::string& where) {
    if (!v.is_number()) schema_error(where + ": not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema_error(where + ": not finite");
    return d;
}

SymMat3 from_square(const json& rows) {
    Mat3 m;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!rows[i].is_array() || rows[i].size() != 3) schema_error("matrix row " + std::to_string(i + 1) + " must have 3 entries");
        for (std::size_t j = 0; j < 3; ++j)
            m(i, j) = number(rows[i][j], "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    const double asym = frobenius_norm(m - m.transposed());
    if (asym > 1e-12 * frobenius_norm(m)) schema_error("matrix is not symmetric (‖A−Aᵀ‖ = " + textio::format_double(asym) + ")");
    return SymMat3::from_mat(m);
}

std::array<bool, 3> bools(const json& j) { return j.get<std::array<bool, 3>>(); }
Vec3 vec3(const json& j) { return j.get<Vec3>(); }

}  // namespace

SymMat3 parse_matrix_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        schema_error(std::string("invalid JSON: ") + e.what());
    }
    if (j.is_object()) {
        if (!j.contains("matrix")) schema_error("JSON object must have a 'matrix' field");
        j = j["matrix"];
    }
    if (!j.is_array()) schema_error("matrix must be a 3×3 array or 6 coefficients");
    if (j.size() == 3) return from_square(j);
    if (j.size() == 6) {
        std::array<double, 6> c{};
        for (std::size_t k = 0; k < 6; ++k) c[k] = number(j[k], "coefficient " + std::to_string(k + 1));
        return SymMat3::from_coefficients(c);
    }
    schema_error("matrix array has " + std::to_string(j.size()) + " entries; expected 3 rows or 6 coefficients");
}

SymMat3 parse_matrix_csv(std::string_view text) {
    bool seen_header = false;
    std::size_t line_no = 0;
    for (const auto raw : textio::lines(text)) {
        ++line_no;
        const auto line = textio::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto cells = textio::split(line);
        if (!seen_header && cells.size() == 6 && cells[0] == "a11") {
            seen_header = true;
            continue;
        }
        if (cells.size() != 6)
            schema_error("line " + std::to_string(line_no) + ": expected 6 values (a11,a22,a33,a12,a13,a23), got " +
                         std::to_string(cells.size()));
        std::array<double, 6> c{};
        for (std::size_t k = 0; k < 6; ++k) {
            const auto v = textio::parse_double(cells[k]);
            if (!v || !std::isfinite(*v))
                schema_error("line " + std::to_string(line_no) + ", field " + std::to_string(k + 1) + ": invalid number '" +
                             std::string(cells[k]) + "'");
            c[k] = *v;
        }
        return SymMat3::from_coefficients(c);
    }
    schema_error("no matrix row found");
}

SymMat3 load_matrix(const std::filesystem::path& path) {
    const std::string text = textio::read_file(path.string());
    try {
        return path.extension() == ".json" ? parse_matrix_json(text) : parse_matrix_csv(text);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json to_json(const Mat3& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
    return rows;
}

json to_json(const DistanceReport& r) {
    return {
        {"d_riemann", r.d_riemann},
        {"d_chordal_scaled", r.d_chordal_scaled},
        {"d_C_raw", r.d_C_raw},
        {"d_E_plus", r.d_E_plus},
        {"d_E_minus", r.d_E_minus},
        {"d_E_semi", r.d_E_semi},
        {"hw_min_gap", r.hw_min_gap},
        {"hw_max_gap", r.hw_max_gap},
        {"theta_E_lb", r.theta_E_lb},
        {"theta_E_ub", r.theta_E_ub},
        {"theta_C_lb", r.theta_C_lb},
        {"theta_C_ub", r.theta_C_ub},
        {"m_diag", to_json(r.m_diag)},
        {"n_diag", to_json(r.n_diag)},
        {"lambda_a", to_json(r.lambda_a)},
        {"lambda_b", to_json(r.lambda_b)},
        {"degenerate_a", r.degenerate_a},
        {"degenerate_b", r.degenerate_b},
        {"theta_E_degenerate", r.theta_E_degenerate},
        {"theta_C_degenerate", r.theta_C_degenerate},
    };
}

DistanceReport distance_report_from_json(const json& j) {
    DistanceReport r;
    try {
        // ±∞ estimates are written as null by the JSON library.
        const auto real = [&](const char* key) {
            const auto& v = j.at(key);
            return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
        };
        r.d_riemann = real("d_riemann");
        r.d_chordal_scaled = real("d_chordal_scaled");
        r.d_C_raw = real("d_C_raw");
        r.d_E_plus = real("d_E_plus");
        r.d_E_minus = real("d_E_minus");
        r.d_E_semi = real("d_E_semi");
        r.hw_min_gap = real("hw_min_gap");
        r.hw_max_gap = real("hw_max_gap");
        r.theta_E_lb = real("theta_E_lb");
        r.theta_E_ub = real("theta_E_ub");
        r.theta_C_lb = real("theta_C_lb");
        r.theta_C_ub = real("theta_C_ub");
        r.m_diag = vec3(j.at("m_diag"));
        r.n_diag = vec3(j.at("n_diag"));
        r.lambda_a = vec3(j.at("lambda_a"));
        r.lambda_b = vec3(j.at("lambda_b"));
        r.degenerate_a = bools(j.at("degenerate_a"));
        r.degenerate_b = bools(j.at("degenerate_b"));
        r.theta_E_degenerate = j.at("theta_E_degenerate").get<bool>();
        r.theta_C_degenerate = j.at("theta_C_degenerate").get<bool>();
    } catch (const json::exception& e) {
        schema_error(std::string("distance report JSON: ") + e.what());
    }
    return r;
}

}  // namespace commdist
