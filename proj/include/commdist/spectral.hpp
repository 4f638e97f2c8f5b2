#pragma once

// MPT spectral signatures: per-frequency real symmetric tensors N⁰, R(ω),
// I(ω) of one object, their commutator curves and distance-measure curves.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commdist/kernels.hpp"
#include "commdist/linalg3.hpp"
#include "commdist/semimetrics.hpp"

namespace commdist {

struct SpectralSignature {
    std::string object_id;
    std::string class_label;
    std::vector<double> omega;  ///< rad/s, strictly increasing
    SymMat3 n0;                 ///< frequency independent
    std::vector<SymMat3> r;
    std::vector<SymMat3> i;
    std::optional<double> alpha;
    /// Extra `key=value` metadata carried through unchanged (σ*, μr, ...).
    std::map<std::string, std::string> metadata;

    std::size_t size() const noexcept { return omega.size(); }
    /// R̃(ω_k) = N⁰ + R(ω_k); never stored.
    SymMat3 rtilde(std::size_t k) const noexcept { return n0 + r[k]; }

    /// Throws SchemaError (sizes, finiteness) or NonMonotoneFrequency.
    void validate() const;
};

enum class SignatureFormat { csv, json };

/// Picks the format from the file extension (.json → json, otherwise csv).
SignatureFormat format_from_path(const std::filesystem::path& path) noexcept;

SpectralSignature load_signature(const std::filesystem::path& path, SignatureFormat format);
inline SpectralSignature load_signature(const std::filesystem::path& path) {
    return load_signature(path, format_from_path(path));
}
void save_signature(const SpectralSignature& sig, const std::filesystem::path& path, SignatureFormat format);

/// Parses CSV text; metadata may precede the header as `# key=value` lines.
SpectralSignature parse_signature_csv(std::string_view text);
std::string signature_to_csv(const SpectralSignature& sig);
SpectralSignature parse_signature_json(std::string_view text);
std::string signature_to_json(const SpectralSignature& sig);

/// Commutators at one frequency: Z = [R, I], Z⁽⁰⁾ = [N⁰, I], Z̃ = [R̃, I].
struct CommutatorSample {
    Mat3 z, z0, ztilde;
};
CommutatorSample commutators_at(const SpectralSignature& sig, std::size_t k) noexcept;

/// Pair of tensors compared per frequency; the second member is always I(ω).
enum class TensorPair { R_I, N0_I, Rtilde_I };
TensorPair parse_tensor_pair(std::string_view name);
const char* to_string(TensorPair pair) noexcept;

struct SignatureCurves {
    std::vector<double> omega;
    std::vector<double> z_norm, z0_norm, ztilde_norm;
    /// Distance curves; NaN at excluded frequencies or if not computed.
    std::vector<double> theta_E, theta_C, d_riemann, d_chordal_scaled;
    std::vector<bool> excluded;

    std::size_t size() const noexcept { return omega.size(); }
};

/// ‖Z‖, ‖Z⁽⁰⁾‖, ‖Z̃‖ per frequency; distance curves left as NaN, nothing excluded.
SignatureCurves commutator_signature(const SpectralSignature& sig, kernels::Isa isa = kernels::best_isa());

struct DistanceSignatureOptions {
    /// Relative eigenvalue gap below which a frequency is excluded.
    double tol_gap = 1e-8;
    Bound bound = Bound::lower;
    CardanoOptions eigen{};
};

/// Commutator norms plus d_R, d_F/√2, θ_E and θ_C of the selected pair at every
/// frequency where neither tensor has a repeated eigenvalue.
SignatureCurves distance_signature(const SpectralSignature& sig, TensorPair pair,
                                   const DistanceSignatureOptions& opts = {});

/// True if either tensor of the pair at frequency k has a relative gap below tol.
bool is_excluded(const SpectralSignature& sig, TensorPair pair, std::size_t k, double tol);

enum class CurveField { z_norm, z0_norm, ztilde_norm, theta_E, theta_C, d_riemann, d_chordal_scaled };
CurveField parse_curve_field(std::string_view name);
const std::vector<double>& curve_values(const SignatureCurves& curves, CurveField field) noexcept;

/// Least-squares slope of log(value) against log(ω) over samples with
/// ω ∈ [omega_lo, omega_hi] and finite positive values.
/// Throws InsufficientSamples if fewer than three remain.
double scaling_exponent(const SignatureCurves& curves, CurveField field, double omega_lo, double omega_hi);

/// Header `omega,z_norm,z0_norm,ztilde_norm,d_riemann,d_chordal_scaled,theta_E,theta_C,excluded`;
/// NaN cells are written empty.
std::string curves_to_csv(const SignatureCurves& curves);
SignatureCurves parse_curves_csv(std::string_view text);

}  // namespace commdist
