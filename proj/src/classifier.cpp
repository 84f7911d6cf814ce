#include "ecd/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "ecd/detail/random.hpp"

namespace ecd {

Eigen::VectorXd quadratic_expansion(const Eigen::VectorXd& z) {
    const int n = static_cast<int>(z.size());
    Eigen::VectorXd phi(1 + 2 * n + n * (n - 1) / 2);
    int at = 0;
    phi(at++) = 1.0;
    for (int i = 0; i < n; ++i) phi(at++) = z(i);
    for (int i = 0; i < n; ++i) phi(at++) = z(i) * z(i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) phi(at++) = z(i) * z(j);
    return phi;
}

Eigen::VectorXd expand_features(const FeatureVector& x, const Eigen::VectorXd& mu,
                                const Eigen::VectorXd& sigma) {
    Eigen::VectorXd z(kFeatureCount);
    for (int i = 0; i < kFeatureCount; ++i) z(i) = (x[i] - mu(i)) / sigma(i);
    return quadratic_expansion(z);
}

SignModel train(const Dataset& data, double lambda) {
    const auto& rows = data.rows;
    const std::size_t n = rows.size();
    if (n < 500) throw std::invalid_argument("train: need at least 500 rows");
    if (!(lambda >= 0.0)) throw std::invalid_argument("train: lambda must be >= 0");

    std::size_t n_pos = 0;
    for (const auto& r : rows) n_pos += (r.label > 0);
    if (n_pos == 0 || n_pos == n)
        throw DegenerateData("train: both labels must be present");

    SignModel model;
    model.lambda = lambda;
    model.n_train = n;

    model.mu = Eigen::VectorXd::Zero(kFeatureCount);
    for (const auto& r : rows)
        for (int i = 0; i < kFeatureCount; ++i) model.mu(i) += r.x[i];
    model.mu /= static_cast<double>(n);

    model.sigma = Eigen::VectorXd::Zero(kFeatureCount);
    for (const auto& r : rows)
        for (int i = 0; i < kFeatureCount; ++i) {
            const double d = r.x[i] - model.mu(i);
            model.sigma(i) += d * d;
        }
    model.sigma = (model.sigma / static_cast<double>(n)).cwiseSqrt();
    for (int i = 0; i < kFeatureCount; ++i)
        if (model.sigma(i) < 1e-12) model.sigma(i) = 1.0;  // constant feature

    // Row-averaged normal equations, accumulated in index order.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(kQuadraticTerms, kQuadraticTerms);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(kQuadraticTerms);
    for (const auto& r : rows) {
        const Eigen::VectorXd phi = expand_features(r.x, model.mu, model.sigma);
        a.selfadjointView<Eigen::Lower>().rankUpdate(phi);
        b += static_cast<double>(r.label) * phi;
    }
    a /= static_cast<double>(n);
    b /= static_cast<double>(n);
    a.diagonal().array() += lambda;

    Eigen::LDLT<Eigen::MatrixXd> solver(a.selfadjointView<Eigen::Lower>());
    if (solver.info() != Eigen::Success || !solver.isPositive())
        throw DegenerateData("train: normal system is singular beyond the ridge term");
    model.L = solver.solve(b);
    if (!model.L.allFinite())
        throw DegenerateData("train: normal system produced non-finite coefficients");
    return model;
}

double decision_value(const SignModel& model, const FeatureVector& x) {
    return expand_features(x, model.mu, model.sigma).dot(model.L);
}

Prediction predict(const SignModel& model, const FeatureVector& x, double epsilon) {
    const double f = decision_value(model, x);
    if (f > epsilon) return Prediction::Positive;
    if (f < -epsilon) return Prediction::Negative;
    return Prediction::Abstain;
}

Prediction predict(const SignModel& model, const FeatureVector& x) {
    return predict(model, x, model.epsilon);
}

ModelMetrics evaluate_model(const SignModel& model, const std::vector<DatasetRow>& rows,
                            double epsilon) {
    ModelMetrics m;
    m.n_total = rows.size();
    std::size_t correct = 0;
    for (const auto& r : rows) {
        switch (predict(model, r.x, epsilon)) {
            case Prediction::Abstain:
                ++m.n_abstained;
                break;
            case Prediction::Positive:
                (r.label > 0 ? m.tp : m.fp)++;
                correct += (r.label > 0);
                break;
            case Prediction::Negative:
                (r.label < 0 ? m.tn : m.fn)++;
                correct += (r.label < 0);
                break;
        }
    }
    m.abstention_rate = m.n_total ? static_cast<double>(m.n_abstained) / m.n_total : 0.0;
    const std::size_t retained = m.n_total - m.n_abstained;
    if (retained > 0) m.accuracy = static_cast<double>(correct) / retained;
    return m;
}

bool is_holdout_row(std::size_t index) {
    // Stable hash-based assignment, ~20% holdout.
    return detail::mix64(static_cast<std::uint64_t>(index) ^ 0xECDA7A5E7ULL) % 5 == 0;
}

void split_rows(const std::vector<DatasetRow>& rows, std::vector<DatasetRow>& train_rows,
                std::vector<DatasetRow>& holdout_rows) {
    train_rows.clear();
    holdout_rows.clear();
    for (std::size_t i = 0; i < rows.size(); ++i)
        (is_holdout_row(i) ? holdout_rows : train_rows).push_back(rows[i]);
}

double epsilon_for_abstention(const SignModel& model, const std::vector<DatasetRow>& rows,
                              double target_rate) {
    if (target_rate <= 0.0 || rows.empty()) return 0.0;
    std::vector<double> mags;
    mags.reserve(rows.size());
    for (const auto& r : rows) mags.push_back(std::abs(decision_value(model, r.x)));
    std::sort(mags.begin(), mags.end());
    if (target_rate >= 1.0) return mags.back();
    const std::size_t k = static_cast<std::size_t>(std::ceil(target_rate * rows.size()));
    return mags[std::min(k, mags.size()) - 1];
}

}  // namespace ecd
