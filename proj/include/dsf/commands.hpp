#ifndef DSF_COMMANDS_HPP
#define DSF_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsf/model.hpp"
#include "dsf/poly.hpp"
#include "dsf/spectra.hpp"
#include "dsf/trainer.hpp"

namespace dsf::cli {

namespace fs = std::filesystem;

struct DiagnoseOptions {
    fs::path data;
    fs::path out;
    int k_hops = 2;
    std::vector<FrequencyBand> bands{FrequencyBand::Low, FrequencyBand::Mid, FrequencyBand::High};
};

/// homophily.csv, frequency_<band>.csv/.json and summary.json under opts.out.
void cmd_diagnose(DiagnoseOptions const& opts, std::ostream& log);

struct TrainOptions {
    fs::path data;
    fs::path config;
    fs::path out;
    int runs = 10;
    int splits = 10;
    std::uint64_t seed = 0;
    SplitMode split_mode = SplitMode::Dense;
    bool baseline = false; ///< theta == 1 (plain backbone)
    bool no_ipe = false;   ///< free per-node filter weights
    std::optional<int> max_epochs; ///< overrides the config when set
};

struct TrainSummary {
    std::string tag;
    Aggregate accuracy;
    std::vector<RunResult> cells;
    fs::path metrics_path;
};

/// Trains every (run, split) cell and writes metrics_<tag>.json, beta_<tag>.csv
/// and checkpoint_<tag>.json (the latter two from cell run 0 / split 0).
TrainSummary cmd_train(TrainOptions const& opts, std::ostream& log);

/// Output tag, e.g. "dsf-gpr-r", "gpr-base", "dsf-bern-i-noipe".
std::string train_tag(DsfConfig const& cfg);

struct AnalyzeOptions {
    fs::path beta;
    fs::path out;
    BasisFamily basis = BasisFamily::Monomial;
    double jacobi_a = 1.0;
    double jacobi_b = 1.0;
    int clusters = 5;
    int grid = 101;
    std::uint64_t seed = 0;
};

/// clusters.csv, centroid_curves.csv, pca.csv and summary.json under opts.out.
void cmd_analyze(AnalyzeOptions const& opts, std::ostream& log);

struct Prop1Options {
    BasisFamily basis = BasisFamily::Monomial;
    int K = 10;
    int trials = 100;
    int grid = 64;
    std::uint64_t seed = 0;
    double jacobi_a = 1.0;
    double jacobi_b = 1.0;
    bool unit_xi = false; ///< use xi = 1 in every trial
    double tolerance = 1e-8;
};

struct Prop1Report {
    double max_error = 0.0;
    int trials = 0;
    bool pass = false;
};

/// Random (alpha, xi) trials of coefficient rescaling; max |f(xi x) - g(x)| over the grid.
Prop1Report cmd_prop1_check(Prop1Options const& opts, std::ostream& log);

/// Parses argv and dispatches. Returns the process exit code:
/// 0 success, 1 usage/config error, 2 data error, 3 numerical failure.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

} // namespace dsf::cli

#endif // DSF_COMMANDS_HPP
