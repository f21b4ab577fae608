#ifndef KBR_EXPERIMENTS_HPP
#define KBR_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "kbr/types.hpp"

namespace kbr::experiments {

// Desk-scale defaults; --paper-scale restores the original study sizes
// (30 seeds, 1000 test points).
struct ExperimentConfig {
    std::string experiment;  // posterior-gaussian | abc-compare | filter-synthetic

    std::vector<int> dims = {2};
    int n = 200;
    int ell = 200;
    int n_test = 100;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string hyper = "median";  // median | cv | explicit
    double beta = 1.0;             // explicit hyperparameters
    double eps = 0.0;              // 0 means "use the study default"
    double delta = 0.0;

    // abc-compare. Budgets are per test point and paired with the tolerances:
    // a smaller tolerance gets a larger draw budget, tracing the
    // accuracy-versus-cost curve.
    std::vector<int> kernel_sizes = {50, 100, 200, 500};
    std::vector<std::size_t> abc_budgets = {50, 2000, 200000};
    std::vector<double> abc_tolerances = {1.0, 0.3, 0.1};
    int n_test_abc = 10;

    // filter-synthetic
    std::vector<char> datasets = {'a', 'b'};
    int T = 400;
    int test_length = 1000;
    int lowrank_rank = 60;

    std::string output_dir = "out";
    bool paper_scale = false;

    static ExperimentConfig from_json_file(const std::string& path);
    void apply_paper_scale();
    std::string canonical_string() const;
    std::uint64_t hash() const;
};

// Each returns the path of the CSV it wrote.
std::string run_posterior_gaussian(const ExperimentConfig& cfg);
std::string run_abc_compare(const ExperimentConfig& cfg);
std::string run_filter_synthetic(const ExperimentConfig& cfg);

// --- reusable single-run estimators, shared with the acceptance suite ---

struct PosteriorGaussianRun {
    double mse_kbr_median = 0.0;
    double mse_kbr_cv = 0.0;
    double mse_kde_best = 0.0;
    double mse_kde_loo = 0.0;
    bool ran_cv = false;
};

// One seed of the Gaussian posterior study; which methods run is controlled
// by with_cv (the CV variants dominate the runtime).
PosteriorGaussianRun posterior_gaussian_run(int d, int n, int ell, int n_test,
                                            std::uint64_t seed, bool with_cv);

struct AbcCompareRow {
    std::string method;
    std::size_t draws;
    double tolerance;  // 0 for kernel methods
    double error;      // NaN when every test point had empty acceptance
    double wallclock_sec;
};

std::vector<AbcCompareRow> abc_compare_run(const ExperimentConfig& cfg,
                                           std::uint64_t seed);

struct FilterRunResult {
    double mse_kbr = 0.0;
    double mse_ekf = 0.0;
};

FilterRunResult filter_synthetic_run(char dataset, int T, int test_length,
                                     int rank, std::uint64_t seed,
                                     const std::string& hyper);

}  // namespace kbr::experiments

#endif
