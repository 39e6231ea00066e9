#include "dsf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsf/errors.hpp"
#include "dsf/rng.hpp"

namespace dsf {

SplitMode parse_split_mode(std::string_view name) {
    if (name == "dense") return SplitMode::Dense;
    if (name == "sparse") return SplitMode::Sparse;
    throw ConfigError("unknown split mode '" + std::string(name) + "' (expected dense|sparse)");
}

std::string to_string(SplitMode mode) { return mode == SplitMode::Dense ? "dense" : "sparse"; }

SplitSizes split_sizes(int num_nodes, SplitMode mode) {
    double const share = mode == SplitMode::Dense ? 0.6 : 0.025;
    double const val_share = mode == SplitMode::Dense ? 0.2 : 0.025;
    int const train = static_cast<int>(std::lround(share * num_nodes));
    int const val = std::min(static_cast<int>(std::lround(val_share * num_nodes)), num_nodes - train);
    return {train, val, num_nodes - train - val};
}

std::vector<Split> make_splits(int num_nodes, SplitMode mode, int num_splits, std::uint64_t seed) {
    if (num_splits < 1) throw ConfigError("make_splits: num_splits must be >= 1");
    SplitSizes const sizes = split_sizes(num_nodes, mode);
    if (sizes.train < 1)
        throw ConfigError("make_splits: " + std::to_string(num_nodes) + " nodes leave the " + to_string(mode) +
                          " train split empty");
    std::vector<Split> out;
    for (int s = 0; s < num_splits; ++s) {
        Split sp;
        sp.mode = mode;
        sp.seed = derive_seed({seed, static_cast<std::uint64_t>(s)});
        std::vector<int> order(static_cast<std::size_t>(num_nodes));
        std::iota(order.begin(), order.end(), 0);
        CounterRng rng(sp.seed);
        for (int i = num_nodes - 1; i > 0; --i) std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        auto const b = order.begin();
        sp.train.assign(b, b + sizes.train);
        sp.val.assign(b + sizes.train, b + sizes.train + sizes.val);
        sp.test.assign(b + sizes.train + sizes.val, order.end());
        std::sort(sp.train.begin(), sp.train.end());
        std::sort(sp.val.begin(), sp.val.end());
        std::sort(sp.test.begin(), sp.test.end());
        out.push_back(std::move(sp));
    }
    return out;
}

double accuracy(Eigen::MatrixXd const& logits, std::vector<int> const& targets, std::vector<int> const& rows) {
    if (rows.empty()) return 0.0;
    std::size_t hits = 0;
    for (int r : rows) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < logits.cols(); ++c)
            if (logits(r, c) > logits(r, best)) best = c;
        if (best == targets[static_cast<std::size_t>(r)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(rows.size());
}

std::uint64_t run_seed(std::uint64_t base, int run, int split) {
    return derive_seed({base, static_cast<std::uint64_t>(run), static_cast<std::uint64_t>(split)});
}

RunResult train(ModelContext const& ctx, DsfConfig const& cfg, DsfParams initial, Split const& split,
                std::uint64_t seed, EpochHook hook) {
    cfg.validate();
    Graph const& g = *ctx.graph;
    if (split.train.empty()) throw ConfigError("train: empty training split");
    std::vector<int> const& targets = g.labels();

    DsfParams params = std::move(initial);
    auto entries = params.active(cfg);
    std::vector<ad::AdamOptions> opts;
    for (auto const& e : entries) {
        ad::AdamOptions o;
        o.lr = e.filter_group ? cfg.prop_lr : cfg.lr;
        o.weight_decay = e.filter_group ? cfg.prop_wd : cfg.weight_decay;
        opts.push_back(o);
    }
    ad::AdamState adam(std::move(opts));
    std::vector<Eigen::MatrixXd*> slots;
    for (auto const& e : entries) slots.push_back(e.value);

    RunResult best;
    best.seed = seed;
    best.val_acc = -1.0;
    int epoch = 0;
    ad::Tape tape;
    std::vector<Eigen::MatrixXd> grads(entries.size());
    for (; epoch < cfg.max_epochs; ++epoch) {
        tape.reset();
        BoundParams bound = bind_params(tape, params, cfg);
        DropoutSeeds const drop{derive_seed({seed, static_cast<std::uint64_t>(epoch), 1}),
                                derive_seed({seed, static_cast<std::uint64_t>(epoch), 2})};
        ForwardResult fw = forward(tape, ctx, cfg, bound, true, drop);
        ad::Value loss = total_loss(fw.logits, targets, split.train, cfg, fw.positions);
        double const loss_value = loss.item();
        if (!std::isfinite(loss_value))
            throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) + " (seed " +
                                 std::to_string(seed) + ")");
        tape.backward(loss);
        for (std::size_t j = 0; j < entries.size(); ++j) grads[j] = tape.grad(bound.leaves[j].second);
        ad::adam_step(slots, grads, adam);

        tape.reset();
        BoundParams eval_bound = bind_params(tape, params, cfg);
        ForwardResult ev = forward(tape, ctx, cfg, eval_bound, false);
        Eigen::MatrixXd const& logits = ev.logits.data();
        double const val = accuracy(logits, targets, split.val);
        double const test = accuracy(logits, targets, split.test);
        if (hook) hook(epoch, loss_value, val, test);
        if (val > best.val_acc) {
            best.val_acc = val;
            best.test_acc = test;
            best.train_loss = loss_value;
            best.best_epoch = epoch;
            best.beta = ev.beta_matrix();
            best.best_params = params;
        }
        if (epoch - best.best_epoch >= cfg.patience) {
            ++epoch;
            break;
        }
    }
    best.epochs_run = epoch;
    return best;
}

RunResult train(ModelContext const& ctx, DsfConfig const& cfg, Split const& split, std::uint64_t seed,
                EpochHook hook) {
    Graph const& g = *ctx.graph;
    DsfParams p = init_params(cfg, g.num_features(), g.class_count(), g.num_nodes(), seed);
    return train(ctx, cfg, std::move(p), split, seed, std::move(hook));
}

Aggregate aggregate(std::vector<double> const& values) {
    Aggregate a;
    a.n = static_cast<int>(values.size());
    if (values.empty()) return a;
    a.mean = std::accumulate(values.begin(), values.end(), 0.0) / a.n;
    if (a.n < 2) return a;
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    double const std_dev = std::sqrt(ss / (a.n - 1));
    a.ci95 = 1.96 * std_dev / std::sqrt(static_cast<double>(a.n));
    return a;
}

} // namespace dsf
