// Command-line front end for the two-link-arm energy cyclo-directionality
// pipeline: dataset generation, sign-model training and evaluation, and the
// variational extremum checks.

#include <CLI11.hpp>

#include "ecd/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Cycle-averaged energy-flow analysis for a two-link planar arm"};
    app.require_subcommand(1);

    ecd::GenOptions gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "Generate a labeled trajectory dataset (CSV)");
    cmd_gen->add_option("--config", gen.config_path, "INI config file");
    cmd_gen->add_option("--n", gen.n, "Number of sample indices")->capture_default_str();
    cmd_gen->add_option("--seed", gen.seed, "Sampling seed (overrides config)");
    cmd_gen->add_option("--n-grid", gen.n_grid, "Quadrature grid (power of two >= 64)");
    cmd_gen->add_option("--out", gen.out_path, "Output CSV path")->capture_default_str();
    cmd_gen->add_flag("--quiet", gen.quiet, "Suppress progress lines");

    ecd::TrainOptions train;
    CLI::App* cmd_train = app.add_subcommand("train", "Fit the quadratic sign model");
    cmd_train->add_option("--config", train.config_path, "INI config file");
    cmd_train->add_option("--data", train.data_path, "Dataset CSV")->required();
    cmd_train->add_option("--lambda", train.lambda, "Ridge weight (overrides config)");
    cmd_train->add_option("--out", train.out_model_path, "Output model JSON")
        ->capture_default_str();

    ecd::EvalOptions eval;
    CLI::App* cmd_eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
    cmd_eval->add_option("--model", eval.model_path, "Model JSON")->required();
    cmd_eval->add_option("--data", eval.data_path, "Dataset CSV")->required();
    cmd_eval->add_option("--epsilon", eval.epsilon, "Abstention band (overrides the model)");
    cmd_eval->add_option("--out", eval.out_metrics_path, "Output metrics JSON")
        ->capture_default_str();
    cmd_eval->add_option("--plot-out", eval.out_plot_path,
                         "Decision-value CSV (default: <out>.plot.csv)");

    ecd::VerifyExtremumOptions verify;
    CLI::App* cmd_verify =
        app.add_subcommand("verify-extremum", "Check the rest extremum of the energy ratio");
    cmd_verify->add_option("--config", verify.config_path, "INI config file");
    cmd_verify->add_option("--t-max", verify.t_max, "Conjugate-point scan horizon [s]")
        ->capture_default_str();
    cmd_verify->add_option("--n-scan", verify.n_scan, "Scan points")->capture_default_str();
    cmd_verify->add_option("--out", verify.out_report_path, "Output report JSON")
        ->capture_default_str();

    ecd::GammaOptions gamma;
    CLI::App* cmd_gamma =
        app.add_subcommand("gamma", "Estimate the energy-ratio bound over sampled cycles");
    cmd_gamma->add_option("--config", gamma.config_path, "INI config file");
    cmd_gamma->add_option("--n", gamma.n, "Number of sampled cycles")->capture_default_str();
    cmd_gamma->add_option("--seed", gamma.seed, "Sampling seed (overrides config)");
    cmd_gamma->add_option("--n-grid", gamma.n_grid, "Quadrature grid (power of two >= 64)");
    cmd_gamma->add_option("--out", gamma.out_path, "Output report JSON")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ecd::kExitUsage;
    }

    if (cmd_gen->parsed()) return ecd::cmd_gen(gen);
    if (cmd_train->parsed()) return ecd::cmd_train(train);
    if (cmd_eval->parsed()) return ecd::cmd_eval(eval);
    if (cmd_verify->parsed()) return ecd::cmd_verify_extremum(verify);
    if (cmd_gamma->parsed()) return ecd::cmd_gamma(gamma);
    return ecd::kExitUsage;
}
