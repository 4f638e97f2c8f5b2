#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "commdist/experiments.hpp"
#include "commdist/spectral.hpp"
#include "helpers.hpp"

using namespace commdist;
using testing::error_kind;

namespace {

const std::string kHeader =
    "omega,n0_11,n0_22,n0_33,n0_12,n0_13,n0_23,r_11,r_22,r_33,r_12,r_13,r_23,i_11,i_22,i_33,i_12,i_13,i_23\n";

bool same_bits(const SpectralSignature& a, const SpectralSignature& b) {
    if (a.omega != b.omega || !(a.n0 == b.n0) || a.r.size() != b.r.size() || a.i.size() != b.i.size()) return false;
    for (std::size_t k = 0; k < a.r.size(); ++k)
        if (!(a.r[k] == b.r[k]) || !(a.i[k] == b.i[k])) return false;
    return a.object_id == b.object_id && a.class_label == b.class_label && a.alpha == b.alpha &&
           a.metadata == b.metadata;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("single-frequency CSV") {
    const std::string text = "# object_id=coin\n# class_label=1p\n# sigma=5.8e7\n" + kHeader +
                             "1000,2,2,2,0,0,0,-0.5,-0.4,-0.3,0.01,0,0,0.1,0.2,0.3,0,0.02,0\n";
    const SpectralSignature s = parse_signature_csv(text);
    REQUIRE(s.size() == 1);
    CHECK(s.object_id == "coin");
    CHECK(s.class_label == "1p");
    CHECK(s.metadata.at("sigma") == "5.8e7");
    CHECK_FALSE(s.alpha.has_value());
    CHECK(s.omega[0] == 1000.0);
    CHECK(s.n0 == SymMat3::diag(2, 2, 2));
    CHECK(s.r[0].a12 == 0.01);
    CHECK(s.i[0].a13 == 0.02);
    CHECK(s.rtilde(0).a11 == 1.5);
}

TEST_CASE("frequencies must increase strictly") {
    const std::string row = "0,1,1,1,0,0,0,1,2,3,0,0,0,1,2,3,0,0,0\n";
    auto at = [&](const char* w) {
        std::string r = row;
        return std::string(w) + r.substr(1);
    };
    CHECK(error_kind([&] { parse_signature_csv(kHeader + at("10") + at("10")); }) ==
          ErrorKind::NonMonotoneFrequency);
    CHECK(error_kind([&] { parse_signature_csv(kHeader + at("10") + at("5")); }) ==
          ErrorKind::NonMonotoneFrequency);
    CHECK_FALSE(error_kind([&] { parse_signature_csv(kHeader + at("5") + at("10")); }));
}

TEST_CASE("CSV schema errors") {
    const std::string good = "1,1,1,1,0,0,0,1,2,3,0,0,0,1,2,3,0,0,0\n";
    CHECK(error_kind([&] { parse_signature_csv(good); }) == ErrorKind::SchemaError);
    CHECK(error_kind([&] { parse_signature_csv(""); }) == ErrorKind::SchemaError);
    CHECK(error_kind([&] { parse_signature_csv("omega,r_11\n1,2\n"); }) == ErrorKind::SchemaError);
    CHECK(error_kind([&] { parse_signature_csv(kHeader + "1,1,1,1,0,0,0,1,2,3,0,0,0,1,2,3,0,0\n"); }) ==
          ErrorKind::SchemaError);
    CHECK(error_kind([&] { parse_signature_csv(kHeader + "1,1,1,1,0,0,0,1,2,3,0,0,0,1,2,3,0,0,x\n"); }) ==
          ErrorKind::SchemaError);
    CHECK(error_kind([&] { parse_signature_csv(kHeader + "1,1,1,1,0,0,0,1,2,3,0,0,0,1,2,3,0,0,nan\n"); }) ==
          ErrorKind::SchemaError);
    // N⁰ is frequency independent
    CHECK(error_kind([&] {
              parse_signature_csv(kHeader + good + "2,1.1,1,1,0,0,0,1,2,3,0,0,0,1,2,3,0,0,0\n");
          }) == ErrorKind::SchemaError);
    try {
        parse_signature_csv(kHeader + good + "2,1,1,1,0,0,0,1,2,3,0,0,0,1,2,3,0,0,oops\n");
        FAIL("no throw");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("i_23") != std::string::npos);
    }
}

TEST_CASE("JSON schema errors") {
    CHECK(error_kind([] { parse_signature_json("{"); }) == ErrorKind::SchemaError);
    CHECK(error_kind([] { parse_signature_json("[]"); }) == ErrorKind::SchemaError);
    CHECK(error_kind([] { parse_signature_json(R"({"omega":[1],"n0":[1,1,1,0,0,0],"r":[[1,2,3,0,0,0]]})"); }) ==
          ErrorKind::SchemaError);
    CHECK(error_kind([] {
              parse_signature_json(R"({"omega":[1],"n0":[1,1,1,0,0],"r":[[1,2,3,0,0,0]],"i":[[1,2,3,0,0,0]]})");
          }) == ErrorKind::SchemaError);
    CHECK(error_kind([] {
              parse_signature_json(
                  R"({"omega":[1,2],"n0":[1,1,1,0,0,0],"r":[[1,2,3,0,0,0]],"i":[[1,2,3,0,0,0]]})");
          }) == ErrorKind::SchemaError);
    CHECK(error_kind([] {
              parse_signature_json(
                  R"({"omega":[2,1],"n0":[1,1,1,0,0,0],"r":[[1,2,3,0,0,0],[1,2,3,0,0,0]],"i":[[1,2,3,0,0,0],[1,2,3,0,0,0]]})");
          }) == ErrorKind::NonMonotoneFrequency);
}

TEST_CASE("save and load round trip bit for bit") {
    std::mt19937_64 rng(40);
    SpectralSignature s = random_signature(rng, 17);
    s.object_id = "obj-7";
    s.class_label = "key";
    s.alpha = 0.01;
    s.metadata["mu_r"] = "1";
    testing::TempDir dir("spectral");
    for (auto fmt : {SignatureFormat::csv, SignatureFormat::json}) {
        const auto path = dir / (fmt == SignatureFormat::csv ? "s.csv" : "s.json");
        save_signature(s, path, fmt);
        CHECK(format_from_path(path) == fmt);
        const SpectralSignature back = load_signature(path);
        CHECK(same_bits(s, back));
    }
    CHECK(same_bits(parse_signature_csv(signature_to_csv(s)), parse_signature_json(signature_to_json(s))));
}

TEST_CASE("sidecar metadata") {
    std::mt19937_64 rng(41);
    SpectralSignature s = random_signature(rng, 3);
    testing::TempDir dir("sidecar");
    save_signature(s, dir / "coin.csv", SignatureFormat::csv);
    write_text(dir / "coin.meta.json", R"({"object_id": "c1", "class_label": "2p", "alpha": 0.5, "sigma": 1.5e7})");
    const SpectralSignature back = load_signature(dir / "coin.csv");
    CHECK(back.object_id == "c1");
    CHECK(back.class_label == "2p");
    CHECK(back.alpha == 0.5);
    CHECK(back.metadata.at("sigma") == "15000000");

    write_text(dir / "coin.meta.json", "not json");
    CHECK(error_kind([&] { load_signature(dir / "coin.csv"); }) == ErrorKind::SchemaError);
    CHECK(error_kind([&] { load_signature(dir / "missing.csv"); }) == ErrorKind::SchemaError);
}

TEST_CASE("validate") {
    std::mt19937_64 rng(42);
    SpectralSignature s = random_signature(rng, 4);
    CHECK_NOTHROW(s.validate());
    SpectralSignature short_i = s;
    short_i.i.pop_back();
    CHECK(error_kind([&] { short_i.validate(); }) == ErrorKind::SchemaError);
    SpectralSignature bad = s;
    bad.r[2].a13 = std::nan("");
    CHECK(error_kind([&] { bad.validate(); }) == ErrorKind::SchemaError);
}

TEST_CASE("commutators at one frequency") {
    std::mt19937_64 rng(43);
    const SpectralSignature s = random_signature(rng, 5);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const CommutatorSample c = commutators_at(s, k);
        CHECK(testing::max_abs(c.z + c.z.transposed()) <= 1e-15);
        CHECK(testing::max_abs(c.ztilde + c.ztilde.transposed()) <= 1e-15);
        // [N⁰ + R, I] = [N⁰, I] + [R, I]
        CHECK(testing::max_abs(c.ztilde - (c.z + c.z0)) <= 1e-13);
    }
}

TEST_CASE("commutator curves") {
    std::mt19937_64 rng(44);
    const SpectralSignature s = random_signature(rng, 31);
    const SignatureCurves scalar = commutator_signature(s, kernels::Isa::scalar);
    const SignatureCurves best = commutator_signature(s);
    REQUIRE(scalar.size() == 31);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const CommutatorSample c = commutators_at(s, k);
        CHECK(scalar.z_norm[k] == doctest::Approx(frobenius_norm(c.z)).epsilon(1e-14));
        CHECK(scalar.z0_norm[k] == doctest::Approx(frobenius_norm(c.z0)).epsilon(1e-14));
        CHECK(scalar.ztilde_norm[k] == doctest::Approx(frobenius_norm(c.ztilde)).epsilon(1e-14));
        CHECK(std::abs(best.z_norm[k] - scalar.z_norm[k]) <= 1e-14 * (1 + scalar.z_norm[k]));
        CHECK(std::isnan(scalar.theta_E[k]));
        CHECK_FALSE(scalar.excluded[k]);
    }
}

TEST_CASE("diagonal tensors commute") {
    SpectralSignature s;
    s.omega = {1, 2, 3};
    s.n0 = SymMat3::diag(3, 2, 1);
    for (double w : s.omega) {
        s.r.push_back(SymMat3::diag(-w, -2 * w, -4 * w));
        s.i.push_back(SymMat3::diag(w, 0.5 * w, 0.1));
    }
    for (TensorPair pair : {TensorPair::R_I, TensorPair::N0_I, TensorPair::Rtilde_I}) {
        const SignatureCurves c = distance_signature(s, pair);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(c.z_norm[k] == 0.0);
            CHECK(c.z0_norm[k] == 0.0);
            CHECK(c.d_riemann[k] <= 1e-7);
            CHECK(c.d_chordal_scaled[k] <= 1e-12);
            CHECK(c.theta_C[k] == 0.0);
            CHECK(c.theta_E[k] <= 1e-6);
        }
    }
}

TEST_CASE("distance curves follow the per-frequency report") {
    std::mt19937_64 rng(45);
    const SpectralSignature s = random_signature(rng, 12);
    for (TensorPair pair : {TensorPair::R_I, TensorPair::N0_I, TensorPair::Rtilde_I}) {
        for (Bound bound : {Bound::lower, Bound::upper}) {
            DistanceSignatureOptions opts;
            opts.bound = bound;
            const SignatureCurves c = distance_signature(s, pair, opts);
            for (std::size_t k = 0; k < s.size(); ++k) {
                const SymMat3 first = pair == TensorPair::R_I ? s.r[k] : pair == TensorPair::N0_I ? s.n0 : s.rtilde(k);
                const DistanceReport r = distance_report(first, s.i[k]);
                REQUIRE_FALSE(c.excluded[k]);
                CHECK(c.d_riemann[k] == r.d_riemann);
                CHECK(c.d_chordal_scaled[k] == r.d_chordal_scaled);
                CHECK(c.theta_E[k] == (bound == Bound::lower ? r.theta_E_lb : r.theta_E_ub));
                CHECK(c.theta_C[k] == (bound == Bound::lower ? r.theta_C_lb : r.theta_C_ub));
            }
        }
    }
}

TEST_CASE("rotated copies of the first illustrative matrix") {
    const SymMat3 a = fig1_matrix();
    const EigenDecomp ea = eigh3_cardano(a);
    const double s3 = 1 / std::sqrt(3.0);
    SpectralSignature s;
    s.n0 = SymMat3::identity();
    for (int k = 1; k <= 10; ++k) {
        const double theta = 0.01 * k;
        s.omega.push_back(theta);
        s.r.push_back(a);
        s.i.push_back(rotate_in_eigenframe(ea, AxisAngle::make({s3, s3, s3}, theta)));
    }
    const SignatureCurves c = distance_signature(s, TensorPair::R_I);
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(c.d_riemann[k] == doctest::Approx(s.omega[k]).epsilon(1e-9));
        CHECK(c.d_chordal_scaled[k] == doctest::Approx(2 * std::sin(s.omega[k] / 2)).epsilon(1e-9));
    }
    // d_R is exactly linear in θ here
    CHECK(scaling_exponent(c, CurveField::d_riemann, 0, 1) == doctest::Approx(1.0).epsilon(1e-9));
    // ‖[A, B]‖ ~ θ for small θ
    CHECK(scaling_exponent(c, CurveField::z_norm, 0, 0.05) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("degenerate frequencies are excluded") {
    const SpectralSignature s = crossing_signature(21);
    const SignatureCurves c = distance_signature(s, TensorPair::R_I);
    const std::size_t mid = 10;
    CHECK(c.excluded[mid]);
    CHECK(std::isnan(c.d_riemann[mid]));
    CHECK(std::isnan(c.theta_E[mid]));
    CHECK(c.z_norm[mid] <= 1e-14);
    std::size_t excluded = 0;
    for (std::size_t k = 0; k < s.size(); ++k) excluded += c.excluded[k];
    CHECK(excluded == 1);
    // away from the crossing I only rescales about 2·Id, so the eigenframes agree
    for (std::size_t k = 0; k < mid; ++k) {
        CHECK(c.d_riemann[k] == doctest::Approx(c.d_riemann[20 - k]).epsilon(1e-9));
        CHECK(c.z_norm[k] == doctest::Approx(c.z_norm[20 - k]).epsilon(1e-9));
    }
    // ‖Z‖ grows linearly with the distance from the crossing
    CHECK(c.z_norm[0] == doctest::Approx(2 * c.z_norm[5]).epsilon(1e-9));

    // a looser tolerance can only exclude more
    std::size_t prev = 0;
    for (double tol : {1e-12, 1e-8, 1e-2, 0.1, 0.5}) {
        DistanceSignatureOptions opts;
        opts.tol_gap = tol;
        const SignatureCurves ct = distance_signature(s, TensorPair::R_I, opts);
        std::size_t n = 0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            n += ct.excluded[k];
            CHECK(ct.excluded[k] == is_excluded(s, TensorPair::R_I, k, tol));
        }
        CHECK(n >= prev);
        prev = n;
    }
    CHECK(prev > 1);
}

TEST_CASE("curves are invariant under a global rotation") {
    std::mt19937_64 rng(46);
    const SpectralSignature s = random_signature(rng, 9);
    const SpectralSignature t = rotate_signature(s, random_rotation(rng));
    for (TensorPair pair : {TensorPair::R_I, TensorPair::N0_I, TensorPair::Rtilde_I}) {
        const SignatureCurves a = distance_signature(s, pair), b = distance_signature(t, pair);
        for (std::size_t k = 0; k < s.size(); ++k) {
            CHECK(b.z_norm[k] == doctest::Approx(a.z_norm[k]).epsilon(1e-10));
            CHECK(b.ztilde_norm[k] == doctest::Approx(a.ztilde_norm[k]).epsilon(1e-10));
            CHECK(b.d_riemann[k] == doctest::Approx(a.d_riemann[k]).epsilon(1e-8));
            CHECK(b.theta_E[k] == doctest::Approx(a.theta_E[k]).epsilon(1e-8));
            CHECK(b.theta_C[k] == doctest::Approx(a.theta_C[k]).epsilon(1e-8));
        }
    }
}

TEST_CASE("scaling exponents") {
    std::mt19937_64 rng(47);
    const SymMat3 n0 = random_symmetric(rng), r0 = random_symmetric(rng), i0 = random_symmetric(rng);
    const SpectralSignature lin = linear_signature(n0, r0, i0, 1e-2, 1e2, 25);
    const SignatureCurves c = distance_signature(lin, TensorPair::R_I);
    CHECK(scaling_exponent(c, CurveField::z_norm, 0, 1e9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scaling_exponent(c, CurveField::z0_norm, 1e-1, 1e1) == doctest::Approx(1.0).epsilon(1e-12));

    SpectralSignature quad = lin;
    for (std::size_t k = 0; k < quad.size(); ++k) quad.r[k] = quad.omega[k] * r0;
    const SignatureCurves q = commutator_signature(quad);
    CHECK(scaling_exponent(q, CurveField::z_norm, 0, 1e9) == doctest::Approx(2.0).epsilon(1e-12));

    // scale-free angle: the eigenframes do not move with ν
    CHECK(std::abs(scaling_exponent(c, CurveField::d_riemann, 0, 1e9)) <= 1e-9);

    CHECK(error_kind([&] { scaling_exponent(c, CurveField::z_norm, 1e3, 1e4); }) ==
          ErrorKind::InsufficientSamples);
    // NaN curves have no usable samples
    const SignatureCurves bare = commutator_signature(lin);
    CHECK(error_kind([&] { scaling_exponent(bare, CurveField::theta_E, 0, 1e9); }) ==
          ErrorKind::InsufficientSamples);
}

TEST_CASE("curves CSV round trip") {
    const SpectralSignature s = crossing_signature(7);
    const SignatureCurves c = distance_signature(s, TensorPair::Rtilde_I);
    const std::string text = curves_to_csv(c);
    CHECK(text.rfind("omega,z_norm,z0_norm,ztilde_norm,d_riemann,d_chordal_scaled,theta_E,theta_C,excluded\n", 0) == 0);
    const SignatureCurves back = parse_curves_csv(text);
    REQUIRE(back.size() == c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(back.omega[k] == c.omega[k]);
        CHECK(back.z_norm[k] == c.z_norm[k]);
        CHECK(back.excluded[k] == c.excluded[k]);
        if (c.excluded[k]) {
            CHECK(std::isnan(back.theta_E[k]));
        } else {
            CHECK(back.theta_E[k] == c.theta_E[k]);
            CHECK(back.d_chordal_scaled[k] == c.d_chordal_scaled[k]);
        }
    }
    CHECK(error_kind([] { parse_curves_csv("omega\n1\n"); }) == ErrorKind::SchemaError);
}

TEST_CASE("name parsing") {
    CHECK(parse_tensor_pair("Rtilde_I") == TensorPair::Rtilde_I);
    CHECK(std::string(to_string(TensorPair::N0_I)) == "N0_I");
    CHECK(parse_curve_field("theta_C") == CurveField::theta_C);
    CHECK(error_kind([] { parse_tensor_pair("R_R"); }) == ErrorKind::SchemaError);
    CHECK(error_kind([] { parse_curve_field("bogus"); }) == ErrorKind::SchemaError);
}
