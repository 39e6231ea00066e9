#ifndef DSF_TRAINER_HPP
#define DSF_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dsf/model.hpp"

namespace dsf {

enum class SplitMode { Dense, Sparse };

SplitMode parse_split_mode(std::string_view name);
std::string to_string(SplitMode mode);

/// Disjoint, exhaustive train/val/test node sets, each sorted ascending.
struct Split {
    SplitMode mode = SplitMode::Dense;
    std::uint64_t seed = 0;
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

/// Node counts of one split: train and val are round(share * N), test takes the rest.
struct SplitSizes {
    int train;
    int val;
    int test;
};
SplitSizes split_sizes(int num_nodes, SplitMode mode);

/// `num_splits` seeded shuffles sliced into train/val/test. Split s uses
/// derive_seed({seed, s}). Throws ConfigError when the train part would be empty.
std::vector<Split> make_splits(int num_nodes, SplitMode mode, int num_splits, std::uint64_t seed);

struct RunResult {
    double test_acc = 0.0;
    double val_acc = 0.0;
    double train_loss = 0.0; ///< at the best epoch
    int best_epoch = 0;      ///< 0-based
    int epochs_run = 0;
    std::uint64_t seed = 0;
    int run = 0;
    int split = 0;
    Eigen::MatrixXd beta; ///< N x (K+1) filter weights at the best epoch (eval mode)
    DsfParams best_params;
};

/// Fraction of `rows` where argmax(logits row) equals the target; ties pick the lowest class.
double accuracy(Eigen::MatrixXd const& logits, std::vector<int> const& targets, std::vector<int> const& rows);

/// Optional per-epoch observer: (epoch, train loss, val acc, test acc).
using EpochHook = std::function<void(int, double, double, double)>;

/**
 * Full-graph training with Adam and early stopping on validation accuracy.
 * The test accuracy reported is the one at the first epoch reaching the best
 * validation accuracy. Throws NumericalError on a non-finite loss.
 */
RunResult train(ModelContext const& ctx, DsfConfig const& cfg, DsfParams initial, Split const& split,
                std::uint64_t seed, EpochHook hook = {});

/// Convenience overload: parameters from init_params(cfg, ..., seed).
RunResult train(ModelContext const& ctx, DsfConfig const& cfg, Split const& split, std::uint64_t seed,
                EpochHook hook = {});

struct Aggregate {
    double mean = 0.0;
    double ci95 = 0.0; ///< 1.96 * sample std / sqrt(n); 0 for n == 1
    int n = 0;
};

Aggregate aggregate(std::vector<double> const& values);

/// Seed of cell (run, split) under a base seed.
std::uint64_t run_seed(std::uint64_t base, int run, int split);

} // namespace dsf

#endif // DSF_TRAINER_HPP
