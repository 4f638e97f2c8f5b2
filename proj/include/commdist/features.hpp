#pragma once

// Orientation-invariant feature vectors built from spectral signatures,
// truncated-SVD reduction, and dataset assembly / splitting.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "commdist/linalg3.hpp"
#include "commdist/spectral.hpp"

namespace commdist {

struct Invariants {
    double i1 = 0, i2 = 0, i3 = 0;
};

/// I1 = tr A, I2 = ½(tr²A − tr A²), I3 = det A.
Invariants principal_invariants(const SymMat3& a) noexcept;

using FeatureVector = std::vector<double>;

struct FeatureOptions {
    /// Requested frequencies with a relative eigenvalue gap below this are rejected.
    double tol_gap = 1e-8;
    /// Relative tolerance for matching a requested ω against the signature grid.
    double match_tol = 1e-12;
    CardanoOptions eigen{};
};

/// Length 7M: for m = 0..M−1, x[j·M + m] = I_{j+1}(R̃(ω_m)) (j = 0..2),
/// x[(j+3)·M + m] = I_{j+1}(I(ω_m)), and x[6M + m] = θ_E lower bound of (R̃, I).
/// Throws MissingFrequency, ExcludedFrequency.
FeatureVector build_feature_vector(const SpectralSignature& sig, std::span<const double> frequencies,
                                   const FeatureOptions& opts = {});

struct ClassEncoding {
    std::vector<double> t;

    static ClassEncoding one_hot(std::size_t index, std::size_t classes);
    std::size_t index() const;
};

/// F×G truncated left singular vectors and their singular values.
struct ReducedBasis {
    Eigen::MatrixXd u;
    Eigen::VectorXd sigma;
    double truncation_ratio = 1e-9;

    std::size_t features() const noexcept { return static_cast<std::size_t>(u.rows()); }
    std::size_t rank() const noexcept { return static_cast<std::size_t>(u.cols()); }
    /// FNV-1a over the bytes of u and sigma; identifies the basis a model was trained on.
    std::uint64_t hash() const noexcept;
};

struct Dataset {
    std::vector<FeatureVector> x;
    std::vector<std::size_t> labels;  ///< class index per sample
    std::vector<std::string> class_names;
    std::optional<ReducedBasis> reducer;

    std::size_t size() const noexcept { return x.size(); }
    std::size_t classes() const noexcept { return class_names.size(); }
    std::size_t dim() const noexcept { return x.empty() ? 0 : x.front().size(); }
    ClassEncoding encoding(std::size_t n) const { return ClassEncoding::one_hot(labels.at(n), classes()); }
    std::vector<std::size_t> class_counts() const;

    /// Throws DimensionMismatch (ragged vectors, missing labels) or SchemaError (bad class index).
    void validate() const;
    /// F×P matrix whose columns are the feature vectors.
    Eigen::MatrixXd matrix() const;
};

/// Thin SVD of the F×P data matrix; keeps singular values with σ_n/σ_1 > ratio.
/// Throws TooFewSamples (P < 2), SchemaError (ratio ∉ (0,1)), DegenerateData (σ_1 = 0).
ReducedBasis fit_reducer(const Dataset& data, double truncation_ratio = 1e-9);

/// U_Gᵀ x. Throws DimensionMismatch.
std::vector<double> reduce(const ReducedBasis& basis, std::span<const double> x);
/// Every sample reduced; the result remembers the basis.
Dataset reduce(const ReducedBasis& basis, const Dataset& data);

/// Stratified 3:1 split, ceil(¾ n_c) of each class to train, shuffled with
/// mt19937_64(seed). Throws TooFewSamples if a class has fewer than 4 samples.
std::pair<Dataset, Dataset> split(const Dataset& data, std::uint64_t seed);

/// Per-feature z-scoring fitted on one dataset and applied to others.
struct Standardizer {
    std::vector<double> mean, scale;

    static Standardizer fit(const Dataset& data);
    void apply(Dataset& data) const;
};

struct Manifest {
    std::vector<std::string> class_names;
    std::vector<double> frequencies;
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> signatures;  ///< resolved against the manifest directory
};

Manifest load_manifest(const std::filesystem::path& path);
/// Signature paths are written relative to the manifest directory when possible.
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Loads every signature and builds its feature vector; labels come from
/// each signature's class_label. Throws SchemaError for unknown labels.
Dataset build_dataset(const Manifest& manifest, const FeatureOptions& opts = {});

/// Header `x1,...,xG,label`; label is the class name.
std::string dataset_to_csv(const Dataset& data);
/// Class names are taken from `class_names` when given, else in first-seen order.
Dataset parse_dataset_csv(std::string_view text, const std::vector<std::string>& class_names = {});

/// Adds N(0, (level·‖T‖)²) noise to every coefficient of each R(ω) and I(ω);
/// N⁰ is left unchanged. Symmetry is preserved by construction.
SpectralSignature add_gaussian_noise(const SpectralSignature& sig, double level, std::uint64_t seed);

}  // namespace commdist
