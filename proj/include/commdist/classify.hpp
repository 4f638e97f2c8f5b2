#pragma once

// Multinomial logistic regression with a zero-mean Gaussian prior on the
// weights (MAP fit), plus a diagonal Laplace approximation of the posterior
// for sampling class-probability distributions.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "commdist/features.hpp"

namespace commdist {

struct LogRegModel {
    Eigen::MatrixXd w;  ///< K×G
    Eigen::VectorXd b;  ///< K
    double l2 = 1.0;
    /// Posterior variances of [vec(w) row-major, b] (length K·G + K).
    std::optional<Eigen::VectorXd> laplace_var;
    std::vector<std::string> class_names;
    std::uint64_t basis_hash = 0;

    std::size_t classes() const noexcept { return static_cast<std::size_t>(w.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(w.cols()); }
};

struct TrainOptions {
    double l2 = 1.0;
    int max_iter = 20000;
    /// Stop once ‖∇‖∞ falls to this.
    double tol = 1e-6;
    bool laplace = true;
};

struct TrainReport {
    int iterations = 0;
    bool converged = false;
    double objective = 0;
    double grad_norm = 0;
    /// Objective after every accepted step, starting with the initial value.
    std::vector<double> history;
};

/// Parameters packed as [vec(W) row-major, b].
struct Objective {
    double value = 0;
    Eigen::VectorXd gradient;
};

/// Summed cross-entropy over samples plus (l2/2)‖W‖²; biases are not penalised.
/// `x` is P×G (one sample per row).
Objective objective_and_gradient(const Eigen::MatrixXd& x, std::span<const std::size_t> labels, std::size_t classes,
                                 const Eigen::VectorXd& params, double l2);

/// Full-batch gradient descent with Armijo backtracking from zero parameters.
/// Throws TooFewSamples (empty), SchemaError (l2 < 0), NonFinite.
LogRegModel train(const Dataset& train, const TrainOptions& opts = {}, TrainReport* report = nullptr);

/// softmax(W x + b). Throws DimensionMismatch.
std::vector<double> predict_proba(const LogRegModel& model, std::span<const double> x);
/// argmax, lowest index on ties.
std::size_t predict(const LogRegModel& model, std::span<const double> x);

/// samples[k][s] is the probability of class k under parameter draw s.
/// Throws MissingLaplace, SchemaError (samples < 1).
std::vector<std::vector<double>> predict_distribution(const LogRegModel& model, std::span<const double> x,
                                                      std::size_t samples, std::uint64_t seed);

struct Evaluation {
    double accuracy = 0;
    /// confusion[true][predicted]
    std::vector<std::vector<std::size_t>> confusion;
};

Evaluation evaluate(const LogRegModel& model, const Dataset& test);

std::string model_to_json(const LogRegModel& model);
LogRegModel parse_model_json(std::string_view text);

}  // namespace commdist
