#pragma once

// Sweeps behind the two illustrative examples, and the random / synthetic
// constructions shared by tests, the acceptance binary and the CLI.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "commdist/features.hpp"
#include "commdist/linalg3.hpp"
#include "commdist/semimetrics.hpp"
#include "commdist/so3.hpp"
#include "commdist/spectral.hpp"

namespace commdist {

/// The 3×3 matrix of the first illustrative example.
SymMat3 fig1_matrix() noexcept;
/// [[1+ε, .01, .01], [.01, 1−ε, .01], [.01, .01, 2]].
SymMat3 fig2_matrix(double eps) noexcept;

struct Fig1Row {
    double theta = 0;
    DistanceReport report;
};

/// θ_j = θ_min + (θ_max − θ_min)·j/steps for j = 1..steps; B is A rotated
/// about k = (1,1,1)/√3 in its own eigenframe, with the same eigenvalues.
std::vector<Fig1Row> fig1_sweep(double theta_min = 0.0, double theta_max = 0.1, std::size_t steps = 100,
                                const ReportOptions& opts = {});

struct Fig2Row {
    double eps = 0;
    DistanceReport report;
};

/// Log-spaced ε from eps_min to eps_max (inclusive); B = diag(1, 2, 3).
std::vector<Fig2Row> fig2_sweep(double eps_min = 1e-3, double eps_max = 1e-1, std::size_t steps = 50,
                                const ReportOptions& opts = {});

std::string fig1_csv(const std::vector<Fig1Row>& rows);
std::string fig2_csv(const std::vector<Fig2Row>& rows);

/// Uniformly distributed proper rotation (normalised Gaussian quaternion).
Rotation3 random_rotation(std::mt19937_64& rng);
/// Entries uniform in [lo, hi].
SymMat3 random_symmetric(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0);
Vec3 random_unit_vector(std::mt19937_64& rng);
/// Descending spectrum in [lo, hi] with every pairwise gap at least min_gap.
Vec3 random_spectrum(std::mt19937_64& rng, double lo, double hi, double min_gap);

/// Every tensor conjugated by q.
SpectralSignature rotate_signature(const SpectralSignature& sig, const Rotation3& q);

/// Random tensors at `n` log-spaced frequencies in [1e2, 1e5].
SpectralSignature random_signature(std::mt19937_64& rng, std::size_t n);

/// R(ν) = R₀ and I(ν) = ν·I₀ on log-spaced ν in [nu_lo, nu_hi].
SpectralSignature linear_signature(const SymMat3& n0, const SymMat3& r0, const SymMat3& i0, double nu_lo,
                                   double nu_hi, std::size_t n);

/// I(ω) interpolates diag(1,2,3) → diag(3,2,1)·scale in a fixed rotated frame,
/// so its two outer eigenvalues cross at the middle of the grid; R is a fixed
/// non-diagonal tensor.
SpectralSignature crossing_signature(std::size_t n);

/// Gaussian clusters: class means on a simplex-like set with pairwise
/// distance `separation`·σ, unit σ, embedded in `features` dimensions by a
/// random orthonormal map. Feature matrix rank is min(features, dim + noise).
Dataset gaussian_cluster_dataset(std::size_t classes, std::size_t per_class, std::size_t dim, std::size_t features,
                                 double separation, std::uint64_t seed);

/// P samples of exact rank `rank` in `features` dimensions plus N(0, noise²).
Dataset low_rank_dataset(std::size_t samples, std::size_t features, std::size_t rank, double noise,
                         std::uint64_t seed);

struct SynthLibraryOptions {
    std::size_t classes = 5;
    std::size_t per_class = 40;
    std::size_t frequencies = 8;  ///< signature grid size
    std::size_t selected = 4;     ///< frequencies used for features
    double jitter = 0.02;         ///< relative amplitude jitter per sample
    std::uint64_t seed = 1;
    SignatureFormat format = SignatureFormat::csv;
};

/// Writes one randomly oriented signature per object into `dir` plus
/// `manifest.json`; returns the manifest.
Manifest write_synthetic_library(const std::filesystem::path& dir, const SynthLibraryOptions& opts);
/// The same objects in memory.
std::vector<SpectralSignature> synthetic_library(const SynthLibraryOptions& opts, std::vector<double>* selected = nullptr);

}  // namespace commdist
