#include "ecd/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ecd {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string expected_header() {
    std::string h;
    for (int i = 1; i <= kFeatureCount; ++i) h += "x" + std::to_string(i) + ",";
    return h + "phi12bar,label";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

json sampler_to_json(const SamplerConfig& s) {
    return json{{"coeff_min", s.coeff_min}, {"coeff_max", s.coeff_max}, {"t_min", s.T_min},
                {"t_max", s.T_max},         {"rho", s.rho},             {"qa", {s.qa(0), s.qa(1)}},
                {"qb", {s.qb(0), s.qb(1)}}, {"max_retries", s.max_retries}};
}

}  // namespace

void write_dataset_csv(const std::string& path, const std::vector<DatasetRow>& rows) {
    std::ofstream out = open_out(path);
    out << expected_header() << "\n";
    for (const auto& r : rows) {
        for (const double v : r.x) out << fmt(v) << ",";
        out << fmt(r.phi12bar) << "," << r.label << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<DatasetRow> read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "': empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header())
        throw SchemaError("'" + path + "': header mismatch, expected '" + expected_header() + "'");

    std::vector<DatasetRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        DatasetRow row;
        const char* p = line.data();
        const char* end = p + line.size();
        const auto where = [&] { return "'" + path + "' line " + std::to_string(lineno); };
        const auto next_field = [&](double& v) {
            const auto [ptr, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{}) throw SchemaError(where() + ": bad number");
            p = ptr;
            if (p < end && *p == ',') ++p;
        };
        for (int i = 0; i < kFeatureCount; ++i) next_field(row.x[i]);
        next_field(row.phi12bar);
        int label = 0;
        const auto [ptr, ec] = std::from_chars(p, end, label);
        if (ec != std::errc{} || ptr != end || (label != 1 && label != -1))
            throw SchemaError(where() + ": label must be +1 or -1");
        row.label = label;
        rows.push_back(row);
    }
    return rows;
}

void write_dataset_meta(const std::string& path, const DatasetMeta& meta) {
    json j{{"sampler", sampler_to_json(meta.sampler)},
           {"quadrature", {{"n_grid", meta.quadrature.n_grid}, {"delta0", meta.quadrature.delta0}}},
           {"seed", meta.seed},
           {"config_hash", meta.config_hash},
           {"counts",
            {{"requested", meta.n_requested},
             {"positive", meta.n_positive},
             {"negative", meta.n_negative},
             {"degenerate", meta.n_degenerate},
             {"exhausted", meta.n_exhausted},
             {"retries", meta.n_retries}}}};
    open_out(path) << j.dump(2) << "\n";
}

void write_model_json(const std::string& path, const SignModel& model,
                      const std::string& config_hash, std::uint64_t seed,
                      const ModelMetrics& holdout_at_zero) {
    json j;
    j["schema"] = "ecd-sign-model/1";
    j["coefficients"] = std::vector<double>(model.L.data(), model.L.data() + model.L.size());
    j["mu"] = std::vector<double>(model.mu.data(), model.mu.data() + model.mu.size());
    j["sigma"] = std::vector<double>(model.sigma.data(), model.sigma.data() + model.sigma.size());
    j["epsilon"] = model.epsilon;
    j["lambda"] = model.lambda;
    j["n_train"] = model.n_train;
    j["training"] = {{"config_hash", config_hash},
                     {"seed", seed},
                     {"holdout_accuracy_at_zero",
                      holdout_at_zero.accuracy ? json(*holdout_at_zero.accuracy) : json(nullptr)},
                     {"holdout_rows", holdout_at_zero.n_total}};
    open_out(path) << j.dump(2) << "\n";
}

SignModel read_model_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }
    if (j.value("schema", "") != "ecd-sign-model/1")
        throw SchemaError("'" + path + "': not an ecd-sign-model/1 file");

    SignModel model;
    const auto load_vec = [&](const char* key, Eigen::Index expected) {
        const auto& arr = j.at(key);
        if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != expected)
            throw SchemaError("'" + path + "': '" + key + "' must hold " +
                              std::to_string(expected) + " numbers");
        Eigen::VectorXd v(expected);
        for (Eigen::Index i = 0; i < expected; ++i) v(i) = arr[i].get<double>();
        return v;
    };
    try {
        model.L = load_vec("coefficients", kQuadraticTerms);
        model.mu = load_vec("mu", kFeatureCount);
        model.sigma = load_vec("sigma", kFeatureCount);
        model.epsilon = j.at("epsilon").get<double>();
        model.lambda = j.at("lambda").get<double>();
        model.n_train = j.at("n_train").get<std::size_t>();
    } catch (const json::exception& e) {
        throw SchemaError("'" + path + "': " + e.what());
    }
    if (model.sigma.minCoeff() <= 0.0)
        throw SchemaError("'" + path + "': sigma entries must be strictly positive");
    return model;
}

void write_metrics_json(const std::string& path, const ModelMetrics& m, double epsilon,
                        const std::string& model_path, const std::string& data_path) {
    json j{{"n_total", m.n_total},
           {"n_abstained", m.n_abstained},
           {"abstention_rate", m.abstention_rate},
           {"accuracy_on_retained", m.accuracy ? json(*m.accuracy) : json(nullptr)},
           {"confusion", {{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}}},
           {"epsilon", epsilon},
           {"model", model_path},
           {"dataset", data_path}};
    open_out(path) << j.dump(2) << "\n";
}

void write_plot_csv(const std::string& path, const std::vector<double>& decision_values) {
    std::ofstream out = open_out(path);
    out << "index,f\n";
    for (std::size_t i = 0; i < decision_values.size(); ++i)
        out << i << "," << fmt(decision_values[i]) << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace ecd
