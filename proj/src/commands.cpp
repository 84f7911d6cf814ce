#include "ecd/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <vector>

#include <json.hpp>

#include "ecd/dataset_io.hpp"
#include "ecd/detail/parallel.hpp"

namespace ecd {

namespace {

using nlohmann::json;

std::ofstream open_report(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

// Labels sample indices [first, first + count) into `data`, skipping and
// counting dead-band and exhausted indices.
void generate_range(Dataset& data, std::size_t first, std::size_t count, std::uint64_t seed,
                    const RunConfig& config) {
    struct Slot {
        DatasetRow row;
        int attempts = 0;
        enum { kRow, kDegenerate, kExhausted } kind = kDegenerate;
    };
    std::vector<Slot> slots(count);

    detail::parallel_for(count, [&](std::size_t i) {
        Slot& slot = slots[i];
        try {
            const Sample s = sample_random(seed, first + i, config.sampler);
            slot.attempts = s.attempts;
            const SignLabel label = label_sample(s.traj, config.arm, config.quadrature.n_grid,
                                                 config.quadrature.delta0);
            slot.row = {s.features, label.phi12bar, label.label};
            slot.kind = Slot::kRow;
        } catch (const DegenerateLabel&) {
            slot.kind = Slot::kDegenerate;
        } catch (const SamplingExhausted&) {
            slot.kind = Slot::kExhausted;
            slot.attempts = config.sampler.max_retries;
        }
    });

    for (const Slot& slot : slots) {
        data.meta.n_retries += slot.attempts > 0 ? static_cast<std::size_t>(slot.attempts - 1) : 0;
        switch (slot.kind) {
            case Slot::kRow:
                data.rows.push_back(slot.row);
                (slot.row.label > 0 ? data.meta.n_positive : data.meta.n_negative)++;
                break;
            case Slot::kDegenerate:
                ++data.meta.n_degenerate;
                break;
            case Slot::kExhausted:
                ++data.meta.n_exhausted;
                break;
        }
    }
}

}  // namespace

Dataset generate_dataset(std::size_t n, std::uint64_t seed, const RunConfig& config) {
    Dataset data;
    data.meta.sampler = config.sampler;
    data.meta.quadrature = config.quadrature;
    data.meta.seed = seed;
    data.meta.config_hash = config.config_hash;
    data.meta.n_requested = n;
    data.rows.reserve(n);
    generate_range(data, 0, n, seed, config);
    return data;
}

int cmd_gen(const GenOptions& opts) {
    try {
        RunConfig config = load_run_config(opts.config_path);
        if (opts.n_grid) {
            config.quadrature.n_grid = *opts.n_grid;
            config.quadrature.validate();
        }
        const std::uint64_t seed = opts.seed.value_or(config.seed);

        Dataset data;
        data.meta.sampler = config.sampler;
        data.meta.quadrature = config.quadrature;
        data.meta.seed = seed;
        data.meta.config_hash = config.config_hash;
        data.meta.n_requested = opts.n;
        data.rows.reserve(opts.n);

        // Sample indices are global, so batching only drives progress output.
        const std::size_t batch = std::max<std::size_t>(1000, opts.n / 10);
        for (std::size_t done = 0; done < opts.n; done += batch) {
            const std::size_t count = std::min(batch, opts.n - done);
            generate_range(data, done, count, seed, config);
            if (!opts.quiet && opts.n > batch)
                std::cerr << "gen: " << (done + count) << "/" << opts.n << " samples\n";
        }

        write_dataset_csv(opts.out_path, data.rows);
        write_dataset_meta(opts.out_path + ".meta.json", data.meta);
        std::cout << "wrote " << opts.out_path << " (" << data.rows.size() << " rows: "
                  << data.meta.n_positive << " +1, " << data.meta.n_negative << " -1; "
                  << data.meta.n_degenerate << " degenerate, " << data.meta.n_exhausted
                  << " exhausted) and " << opts.out_path << ".meta.json\n";

        if (data.meta.n_exhausted * 100 > opts.n) {
            std::cerr << "gen: sampling exhausted for " << data.meta.n_exhausted << " of " << opts.n
                      << " indices (> 1%); adjust rho or the period range\n";
            return kExitCheckFailed;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

int cmd_train(const TrainOptions& opts) {
    try {
        const RunConfig config = load_run_config(opts.config_path);
        const double lambda = opts.lambda.value_or(config.classifier.lambda);

        Dataset data;
        data.rows = read_dataset_csv(opts.data_path);

        std::vector<DatasetRow> train_rows, holdout_rows;
        split_rows(data.rows, train_rows, holdout_rows);

        Dataset train_part;
        train_part.rows = std::move(train_rows);
        SignModel model = train(train_part, lambda);

        const ModelMetrics holdout_zero = evaluate_model(model, holdout_rows, 0.0);
        model.epsilon = config.classifier.epsilon
                            ? *config.classifier.epsilon
                            : epsilon_for_abstention(model, holdout_rows,
                                                     config.classifier.target_abstention);

        write_model_json(opts.out_model_path, model, config.config_hash, config.seed, holdout_zero);

        std::cout << "trained on " << model.n_train << " rows (lambda " << lambda << "), holdout "
                  << holdout_rows.size() << " rows, accuracy at epsilon=0 ";
        if (holdout_zero.accuracy)
            std::cout << *holdout_zero.accuracy;
        else
            std::cout << "n/a";
        std::cout << ", stored epsilon " << model.epsilon << "\n"
                  << "wrote " << opts.out_model_path << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

int cmd_eval(const EvalOptions& opts) {
    try {
        const SignModel model = read_model_json(opts.model_path);
        const std::vector<DatasetRow> rows = read_dataset_csv(opts.data_path);
        const double epsilon = opts.epsilon.value_or(model.epsilon);

        const ModelMetrics metrics = evaluate_model(model, rows, epsilon);

        std::vector<double> f_values;
        f_values.reserve(rows.size());
        for (const auto& r : rows) f_values.push_back(decision_value(model, r.x));

        const std::string plot_path =
            opts.out_plot_path.empty() ? opts.out_metrics_path + ".plot.csv" : opts.out_plot_path;
        write_metrics_json(opts.out_metrics_path, metrics, epsilon, opts.model_path,
                           opts.data_path);
        write_plot_csv(plot_path, f_values);

        std::cout << "evaluated " << metrics.n_total << " rows at epsilon " << epsilon
                  << ": abstention " << metrics.abstention_rate << ", accuracy ";
        if (metrics.accuracy)
            std::cout << *metrics.accuracy;
        else
            std::cout << "n/a";
        std::cout << "\nwrote " << opts.out_metrics_path << " and " << plot_path << "\n";
        return kExitOk;
    } catch (const IoError& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

int cmd_verify_extremum(const VerifyExtremumOptions& opts) {
    try {
        const RunConfig config = load_run_config(opts.config_path);
        const ExtremumReport report = verify_extremum(config.arm, opts.t_max, opts.n_scan);

        json j{{"q_star", {report.q_star(0), report.q_star(1)}},
               {"euler_residual", {report.residual(0), report.residual(1)}},
               {"residual_norm", report.residual_norm},
               {"P", {{report.P(0, 0), report.P(0, 1)}, {report.P(1, 0), report.P(1, 1)}}},
               {"Q", {{report.Q(0, 0), report.Q(0, 1)}, {report.Q(1, 0), report.Q(1, 1)}}},
               {"P_positive_definite", report.P_positive_definite},
               {"jacobi_ran", report.jacobi_ran},
               {"conjugate_point_found", report.conjugate_point_found},
               {"min_abs_det_h", report.min_abs_det_h},
               {"t_scan_max", report.t_scan_max},
               {"n_scan", report.n_scan},
               {"jacobi_crosscheck_rel_error", report.jacobi_crosscheck_rel_error},
               {"ratio_at_extremum", report.ratio_at_extremum},
               {"config_hash", config.config_hash},
               {"seed", config.seed}};
        open_report(opts.out_report_path) << j.dump(2) << "\n";

        const auto verdict = [](bool ok) { return ok ? "pass" : "FAIL"; };
        std::cout << "residual_norm " << report.residual_norm << " ("
                  << verdict(report.residual_norm < 1e-8) << ")\n"
                  << "P positive definite: " << verdict(report.P_positive_definite) << "\n"
                  << "no conjugate point on (0, " << opts.t_max << "]: "
                  << verdict(report.jacobi_ran && !report.conjugate_point_found) << "\n"
                  << "wrote " << opts.out_report_path << "\n";
        return report.passed() ? kExitOk : kExitCheckFailed;
    } catch (const ConfigError& e) {
        std::cerr << "verify-extremum: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "verify-extremum: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "verify-extremum: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

int cmd_gamma(const GammaOptions& opts) {
    try {
        RunConfig config = load_run_config(opts.config_path);
        if (opts.n_grid) {
            config.quadrature.n_grid = *opts.n_grid;
            config.quadrature.validate();
        }
        const std::uint64_t seed = opts.seed.value_or(config.seed);

        const GammaEstimate est =
            estimate_gamma(seed, opts.n, config.sampler, config.arm, config.quadrature);
        const double static_ratio =
            static_energy_ratio({-std::numbers::pi / 2.0, 0.0}, config.arm);

        json j{{"gamma21_hat", est.gamma21_hat},
               {"n_samples", est.n_samples},
               {"count_positive", est.count_positive},
               {"count_negative", est.count_negative},
               {"count_degenerate", est.count_degenerate},
               {"argmax_features",
                std::vector<double>(est.argmax_features.begin(), est.argmax_features.end())},
               {"static_reference_ratio", static_ratio},
               {"exceeds_static_reference", est.gamma21_hat > static_ratio},
               {"seed", seed},
               {"config_hash", config.config_hash}};
        open_report(opts.out_path) << j.dump(2) << "\n";

        std::cout << "gamma21_hat " << est.gamma21_hat << " over " << est.count_positive
                  << " positive / " << est.count_negative << " negative / " << est.count_degenerate
                  << " degenerate samples (static reference " << static_ratio << ")\n"
                  << "wrote " << opts.out_path << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "gamma: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "gamma: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NoPositiveSamples& e) {
        std::cerr << "gamma: NoPositiveSamples: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "gamma: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

}  // namespace ecd
