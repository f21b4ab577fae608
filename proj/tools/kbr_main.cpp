#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kbr/experiments.hpp"
#include "kbr/simd.hpp"
#include "kbr/types.hpp"
#include "kbr/version.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

int run(const std::string& experiment, const std::string& config_path,
        std::uint64_t seed, bool seed_given, const std::string& out_dir,
        bool paper_scale) {
    kbr::experiments::ExperimentConfig cfg;
    if (!config_path.empty())
        cfg = kbr::experiments::ExperimentConfig::from_json_file(config_path);
    cfg.experiment = experiment;
    if (seed_given) cfg.seeds = {seed};
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (paper_scale) cfg.apply_paper_scale();

    std::string csv;
    if (experiment == "posterior-gaussian")
        csv = kbr::experiments::run_posterior_gaussian(cfg);
    else if (experiment == "abc-compare")
        csv = kbr::experiments::run_abc_compare(cfg);
    else if (experiment == "filter-synthetic")
        csv = kbr::experiments::run_filter_synthetic(cfg);
    std::printf("wrote %s\n", csv.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel Bayes' rule experiment harness"};
    app.set_version_flag("--version", std::string(kbr::kVersion));

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool paper_scale = false;

    std::string chosen;
    for (const char* name :
         {"posterior-gaussian", "abc-compare", "filter-synthetic"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "run a single seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--paper-scale", paper_scale,
                      "restore the full study sizes");
        sub->callback([&chosen, name] { chosen = name; });
    }
    app.require_subcommand(1);
    app.add_flag("--backend", "print the active SIMD backend and exit");

    CLI11_PARSE(app, argc, argv);
    if (app.count("--backend") > 0) {
        std::printf("%s\n", kbr::simd::active_backend());
        return 0;
    }

    try {
        bool seed_given = app.get_subcommand(chosen)->count("--seed") > 0;
        return run(chosen, config_path, seed, seed_given, out_dir, paper_scale);
    } catch (const kbr::input_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const kbr::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumericError;
    } catch (const kbr::degenerate_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumericError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumericError;
    }
}
