#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "experiment.hpp"
#include "hsp/errors.hpp"

int main(int argc, char** argv) {
    using namespace hsp::app;
    CLI::App app{"Singular-source probing of penetrable scatterers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path;
    std::string out;
    int threads = 1;
    std::uint64_t seed = 1;
    std::string suite = "all";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out, "Output directory (overrides output_dir in the config)");
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Random seed for sampled checks");
    };
    auto* forward = app.add_subcommand("forward", "Plane-wave forward solve; writes far_field.csv and the field");
    forward->add_option("--config", config_path, "JSON experiment config")->required();
    add_common(forward);
    auto* probe = app.add_subcommand("probe", "Singular-source probe at each configured anchor");
    probe->add_option("--config", config_path, "JSON experiment config")->required();
    add_common(probe);
    auto* verify = app.add_subcommand("verify", "Run an oracle suite; writes oracle_report.csv");
    verify->add_option("suite", suite, "kernels | reciprocity | lemma23 | lemma31 | all");
    verify->add_option("--config", config_path, "Unused; accepted for symmetry");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kUsageError;
    }

    RunOptions run{out, threads, seed};
    try {
        if (verify->parsed()) return cmd_verify(suite, run);
        const auto config = load_config(config_path);
        return forward->parsed() ? cmd_forward(config, run) : cmd_probe(config, run);
    } catch (const hsp::ConfigError& e) {
        std::cerr << "{\"error\": \"config\", \"message\": " << nlohmann::json(e.what()).dump() << "}\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": \"runtime\", \"message\": " << nlohmann::json(e.what()).dump() << "}\n";
        return kCheckFailure;
    }
}
