#pragma once

#include <string>
#include <vector>

#include "ecd/classifier.hpp"

namespace ecd {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CSV with header x1..x11,phi12bar,label; doubles printed with %.17g so a
/// rerun of the same generation is byte-identical.
void write_dataset_csv(const std::string& path, const std::vector<DatasetRow>& rows);

/// Strict reader: the header must match and every row must carry 11 features
/// plus value and +-1 label; anything else raises SchemaError (or IoError for
/// filesystem problems).
std::vector<DatasetRow> read_dataset_csv(const std::string& path);

void write_dataset_meta(const std::string& path, const DatasetMeta& meta);

/// Model JSON, deterministic key order; training metadata travels with it.
void write_model_json(const std::string& path, const SignModel& model,
                      const std::string& config_hash, std::uint64_t seed,
                      const ModelMetrics& holdout_at_zero);

SignModel read_model_json(const std::string& path);

void write_metrics_json(const std::string& path, const ModelMetrics& metrics, double epsilon,
                        const std::string& model_path, const std::string& data_path);

/// Plot data reproducing the banded decision-value chart: one (index, f) row
/// per dataset row.
void write_plot_csv(const std::string& path, const std::vector<double>& decision_values);

}  // namespace ecd
