#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ecd/energyflow.hpp"

namespace ecd {

/// 1 + 11 + 11 + 55 terms of the quadratic surface over 11 features.
inline constexpr int kQuadraticTerms = 78;

struct DatasetRow {
    FeatureVector x;
    double phi12bar;
    int label;  ///< +1 or -1
};

/// Provenance of a generated dataset, written alongside the CSV.
struct DatasetMeta {
    SamplerConfig sampler;
    QuadratureConfig quadrature;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::size_t n_requested = 0;
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    std::size_t n_degenerate = 0;
    std::size_t n_exhausted = 0;
    std::size_t n_retries = 0;  ///< rejected singular draws across all samples
};

struct Dataset {
    std::vector<DatasetRow> rows;
    DatasetMeta meta;
};

/// [1, z, z^2, z_i z_j (i<j, lexicographic)] for a standardized vector z.
Eigen::VectorXd quadratic_expansion(const Eigen::VectorXd& z);

/// Standardizes x with (mu, sigma) and expands; length kQuadraticTerms.
Eigen::VectorXd expand_features(const FeatureVector& x, const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& sigma);

/// Quadratic decision surface over standardized trajectory features. The
/// coefficient order matches quadratic_expansion: intercept, linear terms,
/// squares, then pairwise products.
struct SignModel {
    Eigen::VectorXd L;      ///< kQuadraticTerms coefficients
    Eigen::VectorXd mu;     ///< per-feature mean, length kFeatureCount
    Eigen::VectorXd sigma;  ///< per-feature scale, strictly positive
    double epsilon = 0.0;   ///< abstention half-width on f(X)
    double lambda = 1e-6;   ///< ridge weight used in training
    std::size_t n_train = 0;
};

struct DegenerateData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ridge least squares of the +-1 labels on the quadratic expansion. The
/// normal system is averaged over rows, so uniformly duplicating the dataset
/// leaves the solution unchanged and lambda keeps one meaning across sizes.
/// Requires at least 500 rows and both labels present.
SignModel train(const Dataset& data, double lambda);

double decision_value(const SignModel& model, const FeatureVector& x);

enum class Prediction { Positive, Negative, Abstain };

/// +1 if f(X) > epsilon, -1 if f(X) < -epsilon, abstain inside the closed
/// band |f(X)| <= epsilon.
Prediction predict(const SignModel& model, const FeatureVector& x, double epsilon);
Prediction predict(const SignModel& model, const FeatureVector& x);

struct ModelMetrics {
    std::size_t n_total = 0;
    std::size_t n_abstained = 0;
    double abstention_rate = 0.0;
    std::optional<double> accuracy;  ///< over retained rows; absent when all abstain
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

ModelMetrics evaluate_model(const SignModel& model, const std::vector<DatasetRow>& rows,
                            double epsilon);

/// Deterministic ~80/20 split keyed on a hash of the row position, so it is
/// stable across runs without any shuffling state.
bool is_holdout_row(std::size_t index);
void split_rows(const std::vector<DatasetRow>& rows, std::vector<DatasetRow>& train_rows,
                std::vector<DatasetRow>& holdout_rows);

/// Smallest band half-width whose abstention rate reaches the target on the
/// given rows (a quantile of |f|); 0 for a non-positive target.
double epsilon_for_abstention(const SignModel& model, const std::vector<DatasetRow>& rows,
                              double target_rate);

}  // namespace ecd
