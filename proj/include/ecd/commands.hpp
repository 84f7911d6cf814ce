#pragma once

#include <optional>
#include <string>

#include "ecd/config.hpp"
#include "ecd/variational.hpp"

namespace ecd {

/// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Labels n seeded trajectories into dataset rows. Degenerate (dead-band) and
/// exhausted indices are skipped but counted, so counts always sum to n.
/// Deterministic for fixed (config, seed) regardless of worker count.
Dataset generate_dataset(std::size_t n, std::uint64_t seed, const RunConfig& config);

struct GenOptions {
    std::string config_path;  ///< empty means built-in defaults
    std::size_t n = 50000;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_grid;
    std::string out_path = "dataset.csv";
    bool quiet = false;
};
int cmd_gen(const GenOptions& opts);

struct TrainOptions {
    std::string config_path;
    std::string data_path;
    std::optional<double> lambda;
    std::string out_model_path = "model.json";
};
int cmd_train(const TrainOptions& opts);

struct EvalOptions {
    std::string model_path;
    std::string data_path;
    std::optional<double> epsilon;  ///< overrides the band stored in the model
    std::string out_metrics_path = "metrics.json";
    std::string out_plot_path;  ///< defaults to out_metrics_path + ".plot.csv"
};
int cmd_eval(const EvalOptions& opts);

struct VerifyExtremumOptions {
    std::string config_path;
    double t_max = 50.0;
    int n_scan = 1000;
    std::string out_report_path = "extremum_report.json";
};
int cmd_verify_extremum(const VerifyExtremumOptions& opts);

struct GammaOptions {
    std::string config_path;
    std::size_t n = 10000;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_grid;
    std::string out_path = "gamma_report.json";
};
int cmd_gamma(const GammaOptions& opts);

}  // namespace ecd
