#include "dsf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <CLI11.hpp>

#include "dsf/analysis.hpp"
#include "dsf/errors.hpp"
#include "dsf/io.hpp"
#include "dsf/rng.hpp"

namespace dsf::cli {

namespace {

using nlohmann::json;

json value_stats(std::vector<double> const& v) {
    json j;
    j["count"] = v.size();
    if (v.empty()) {
        j["mean"] = nullptr;
        j["std"] = nullptr;
        return j;
    }
    double const mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    j["mean"] = mean;
    j["std"] = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return j;
}

std::string node_value_csv(std::vector<std::pair<int, double>> const& rows) {
    std::string out = "node_id,value\n";
    for (auto const& [i, v] : rows) out += std::to_string(i) + "," + io::format_double(v) + "\n";
    return out;
}

} // namespace

void cmd_diagnose(DiagnoseOptions const& opts, std::ostream& log) {
    if (opts.k_hops < 0) throw ConfigError("diagnose: --k must be >= 0");
    io::Dataset const ds = io::load_dataset(opts.data);
    Graph const& g = ds.graph;

    json summary;
    summary["dataset"] = ds.name;
    summary["num_nodes"] = g.num_nodes();
    summary["num_edges"] = g.num_edges();
    summary["num_classes"] = g.class_count();
    summary["k_hops"] = opts.k_hops;
    summary["edge_homophily"] = edge_homophily(g);

    std::vector<std::pair<int, double>> rows;
    std::vector<double> values;
    for (auto const& s : homophily_histogram(g, opts.k_hops)) {
        rows.emplace_back(s.node, s.value);
        values.push_back(s.value);
    }
    io::atomic_write(opts.out / "homophily.csv", node_value_csv(rows));
    summary["local_homophily"] = value_stats(values);

    if (!opts.bands.empty()) {
        SpectralDecomposition const spec = eigendecompose(normalized_operators(g).laplacian);
        json bands = json::object();
        for (FrequencyBand band : opts.bands) {
            FrequencyHistogram const h = frequency_histogram(g, spec, band, opts.k_hops);
            std::vector<std::pair<int, double>> fr;
            std::vector<double> fv;
            for (auto const& s : h.samples) {
                fr.emplace_back(s.node, s.value);
                fv.push_back(s.value);
            }
            std::string const name(to_string(band));
            io::atomic_write(opts.out / ("frequency_" + name + ".csv"), node_value_csv(fr));
            json side = {{"eigen_index", h.eigen_index}, {"lambda_global", h.lambda_global}, {"k", h.k}};
            io::atomic_write(opts.out / ("frequency_" + name + ".json"), io::dump(side));
            side["stats"] = value_stats(fv);
            bands[name] = side;
        }
        summary["local_frequency"] = bands;
    }
    io::atomic_write(opts.out / "summary.json", io::dump(summary));
    log << "diagnose: " << ds.name << " N=" << g.num_nodes() << " |E|=" << g.num_edges()
        << " H=" << io::format_double(summary["edge_homophily"].get<double>()) << "\n";
}

std::string train_tag(DsfConfig const& cfg) {
    std::string const bb = to_string(cfg.backbone);
    if (cfg.homogeneous) return bb + "-base";
    std::string tag = "dsf-" + bb + "-" + (cfg.mode == DsfMode::R ? "r" : "i");
    if (!cfg.ipe) tag += "-noipe";
    return tag;
}

TrainSummary cmd_train(TrainOptions const& opts, std::ostream& log) {
    if (opts.runs < 1 || opts.splits < 1) throw ConfigError("train: --runs and --splits must be >= 1");
    DsfConfig cfg = io::load_config(opts.config);
    if (opts.baseline && opts.no_ipe) throw ConfigError("train: --baseline and --no-ipe are exclusive");
    if (opts.baseline) cfg.homogeneous = true;
    if (opts.no_ipe) cfg.ipe = false;
    if (opts.max_epochs) cfg.max_epochs = *opts.max_epochs;
    cfg.validate();

    io::Dataset const ds = io::load_dataset(opts.data);
    Graph const& g = ds.graph;
    ModelContext const ctx = make_context(g, cfg);
    auto const splits = make_splits(g.num_nodes(), opts.split_mode, opts.splits, derive_seed({opts.seed, 0x73706c74ULL}));

    TrainSummary summary;
    summary.tag = train_tag(cfg);
    std::vector<double> accs;
    json per_run = json::array();
    for (int s = 0; s < opts.splits; ++s) {
        for (int r = 0; r < opts.runs; ++r) {
            std::uint64_t const seed = run_seed(opts.seed, r, s);
            RunResult res = train(ctx, cfg, splits[s], seed);
            res.run = r;
            res.split = s;
            accs.push_back(res.test_acc);
            per_run.push_back({{"run", r},
                               {"split", s},
                               {"seed", seed},
                               {"test_acc", res.test_acc},
                               {"val_acc", res.val_acc},
                               {"best_epoch", res.best_epoch},
                               {"epochs_run", res.epochs_run}});
            log << summary.tag << " split " << s << " run " << r << ": test " << io::format_double(res.test_acc)
                << " val " << io::format_double(res.val_acc) << " best_epoch " << res.best_epoch << "\n";
            summary.cells.push_back(std::move(res));
        }
    }
    summary.accuracy = aggregate(accs);

    json metrics;
    metrics["dataset"] = ds.name;
    metrics["backbone"] = to_string(cfg.backbone);
    metrics["mode"] = to_string(cfg.mode);
    metrics["variant"] = summary.tag;
    metrics["split_mode"] = to_string(opts.split_mode);
    metrics["runs"] = opts.runs;
    metrics["splits"] = opts.splits;
    metrics["seed"] = opts.seed;
    metrics["mean_acc"] = summary.accuracy.mean;
    metrics["ci95"] = summary.accuracy.ci95;
    metrics["per_run"] = per_run;
    metrics["config_hash"] = io::config_hash(cfg);
    metrics["config"] = io::config_text(cfg);

    summary.metrics_path = opts.out / ("metrics_" + summary.tag + ".json");
    io::atomic_write(summary.metrics_path, io::dump(metrics));
    RunResult& first = summary.cells.front();
    io::atomic_write(opts.out / ("beta_" + summary.tag + ".csv"), io::beta_csv(first.beta));
    json ckpt = {{"config_hash", io::config_hash(cfg)}, {"parameters", io::checkpoint_json(first.best_params, cfg)}};
    io::atomic_write(opts.out / ("checkpoint_" + summary.tag + ".json"), io::dump(ckpt));
    log << summary.tag << ": mean " << io::format_double(summary.accuracy.mean) << " ci95 "
        << io::format_double(summary.accuracy.ci95) << " over " << summary.accuracy.n << " cells\n";
    return summary;
}

void cmd_analyze(AnalyzeOptions const& opts, std::ostream& log) {
    if (opts.grid < 2) throw ConfigError("analyze: --grid must be >= 2");
    if (!fs::is_regular_file(opts.beta)) throw DataError("analyze: beta export not found: " + opts.beta.string());
    Eigen::MatrixXd const beta = io::parse_beta_csv(io::read_file(opts.beta), opts.beta.string());
    int const K = static_cast<int>(beta.cols()) - 1;
    BasisKind kind{opts.basis, K, opts.jacobi_a, opts.jacobi_b};
    try {
        kind.validate();
    } catch (std::invalid_argument const& e) {
        throw ConfigError(std::string("analyze: ") + e.what());
    }

    WeightClustering const cl = cluster_weights(beta, opts.clusters, opts.seed);
    std::string clusters = "node_id,cluster\n";
    for (std::size_t i = 0; i < cl.assignments.size(); ++i)
        clusters += std::to_string(i) + "," + std::to_string(cl.assignments[i]) + "\n";
    io::atomic_write(opts.out / "clusters.csv", clusters);

    Eigen::VectorXd const grid = lambda_grid(opts.grid);
    Eigen::MatrixXd const curves = centroid_curves(cl, kind, grid);
    std::string cc = "cluster,lambda,g\n";
    for (Eigen::Index c = 0; c < curves.rows(); ++c)
        for (Eigen::Index j = 0; j < grid.size(); ++j)
            cc += std::to_string(c) + "," + io::format_double(grid(j)) + "," + io::format_double(curves(c, j)) + "\n";
    io::atomic_write(opts.out / "centroid_curves.csv", cc);

    Eigen::MatrixXd const pc = pca_project(beta);
    std::string pca = "node_id,pc1,pc2\n";
    for (Eigen::Index i = 0; i < pc.rows(); ++i)
        pca += std::to_string(i) + "," + io::format_double(pc(i, 0)) + "," + io::format_double(pc(i, 1)) + "\n";
    io::atomic_write(opts.out / "pca.csv", pca);

    std::vector<int> sizes(static_cast<std::size_t>(cl.k), 0);
    for (int a : cl.assignments) ++sizes[a];
    json summary = {{"basis", to_string(opts.basis)}, {"K", K},          {"clusters", cl.k},
                    {"inertia", cl.inertia},          {"iterations", cl.iterations}, {"cluster_sizes", sizes},
                    {"grid", opts.grid},              {"seed", opts.seed}};
    io::atomic_write(opts.out / "summary.json", io::dump(summary));
    log << "analyze: " << beta.rows() << " nodes, " << cl.k << " clusters, inertia " << io::format_double(cl.inertia)
        << "\n";
}

Prop1Report cmd_prop1_check(Prop1Options const& opts, std::ostream& log) {
    if (opts.trials < 1) throw ConfigError("prop1-check: --trials must be >= 1");
    if (opts.grid < 2) throw ConfigError("prop1-check: --grid must be >= 2");
    BasisKind const kind{opts.basis, opts.K, opts.jacobi_a, opts.jacobi_b};
    try {
        kind.validate();
    } catch (std::invalid_argument const& e) {
        throw ConfigError(std::string("prop1-check: ") + e.what());
    }
    Eigen::VectorXd const grid = lambda_grid(opts.grid);
    CounterRng rng(derive_seed({opts.seed, 0x70726f70ULL}));
    Prop1Report rep;
    rep.trials = opts.trials;
    for (int t = 0; t < opts.trials; ++t) {
        Eigen::VectorXd alpha(opts.K + 1);
        for (Eigen::Index k = 0; k < alpha.size(); ++k) alpha(k) = rng.uniform(-1.0, 1.0);
        double const xi = opts.unit_xi ? 1.0 : 1.0 - rng.uniform(); // (0, 1]
        Eigen::VectorXd const beta = opts.unit_xi ? alpha : rescale_coefficients(alpha, xi, kind);
        Eigen::VectorXd const target = filter_response(alpha, kind, xi * grid);
        Eigen::VectorXd const got = filter_response(beta, kind, grid);
        rep.max_error = std::max(rep.max_error, (target - got).cwiseAbs().maxCoeff());
    }
    rep.pass = rep.max_error < opts.tolerance;
    log << "prop1-check basis=" << to_string(opts.basis) << " K=" << opts.K << " trials=" << opts.trials
        << " max_error=" << io::format_double(rep.max_error) << " " << (rep.pass ? "PASS" : "FAIL") << "\n";
    return rep;
}

// ---- argument parsing ----------------------------------------------------------

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Diverse spectral filtering toolkit", "dsf"};
    app.require_subcommand(1);

    DiagnoseOptions diag;
    std::string bands = "low,mid,high";
    auto* d = app.add_subcommand("diagnose", "Homophily and local frequency histograms of a dataset");
    d->add_option("--data", diag.data, "Dataset directory")->required();
    d->add_option("--out", diag.out, "Output directory")->required();
    d->add_option("--k", diag.k_hops, "Hop radius")->capture_default_str();
    d->add_option("--bands", bands, "Comma-separated subset of low,mid,high (empty: none)")->capture_default_str();

    TrainOptions tr;
    std::string split_mode = "dense";
    int max_epochs = 0;
    auto* t = app.add_subcommand("train", "Train a model over runs x splits");
    t->add_option("--data", tr.data, "Dataset directory")->required();
    t->add_option("--config", tr.config, "Flat key=value config")->required();
    t->add_option("--out", tr.out, "Output directory")->required();
    t->add_option("--runs", tr.runs)->capture_default_str();
    t->add_option("--splits", tr.splits)->capture_default_str();
    t->add_option("--seed", tr.seed)->capture_default_str();
    t->add_option("--split-mode", split_mode, "dense (60/20/20) or sparse (2.5/2.5/95)")->capture_default_str();
    t->add_option("--max-epochs", max_epochs, "Override the config's max_epochs");
    t->add_flag("--baseline", tr.baseline, "Plain backbone filter (theta == 1)");
    t->add_flag("--no-ipe", tr.no_ipe, "Free per-node filter weights instead of positional encoding");

    AnalyzeOptions an;
    std::string an_basis = "gpr";
    auto* a = app.add_subcommand("analyze", "Cluster exported filter weights");
    a->add_option("--beta", an.beta, "beta_<tag>.csv from train")->required();
    a->add_option("--out", an.out, "Output directory")->required();
    a->add_option("--basis", an_basis, "gpr|bern|jacobi")->capture_default_str();
    a->add_option("--jacobi-a", an.jacobi_a)->capture_default_str();
    a->add_option("--jacobi-b", an.jacobi_b)->capture_default_str();
    a->add_option("--clusters", an.clusters)->capture_default_str();
    a->add_option("--grid", an.grid)->capture_default_str();
    a->add_option("--seed", an.seed)->capture_default_str();

    Prop1Options pr;
    std::string pr_basis = "gpr";
    auto* p = app.add_subcommand("prop1-check", "Coefficient rescaling oracle");
    p->add_option("--basis", pr_basis, "gpr|bern|jacobi")->capture_default_str();
    p->add_option("--K", pr.K)->capture_default_str();
    p->add_option("--trials", pr.trials)->capture_default_str();
    p->add_option("--grid", pr.grid)->capture_default_str();
    p->add_option("--seed", pr.seed)->capture_default_str();
    p->add_option("--jacobi-a", pr.jacobi_a)->capture_default_str();
    p->add_option("--jacobi-b", pr.jacobi_b)->capture_default_str();
    p->add_flag("--unit-xi", pr.unit_xi, "Use xi = 1 in every trial");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (d->parsed()) {
            diag.bands.clear();
            std::string_view rest = bands;
            while (!rest.empty()) {
                auto const comma = rest.find(',');
                diag.bands.push_back(parse_frequency_band(rest.substr(0, comma)));
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
            cmd_diagnose(diag, out);
        } else if (t->parsed()) {
            tr.split_mode = parse_split_mode(split_mode);
            if (t->count("--max-epochs") > 0) tr.max_epochs = max_epochs;
            cmd_train(tr, out);
        } else if (a->parsed()) {
            an.basis = parse_basis_family(an_basis);
            cmd_analyze(an, out);
        } else if (p->parsed()) {
            pr.basis = parse_basis_family(pr_basis);
            if (!cmd_prop1_check(pr, out).pass) return 3;
        }
    } catch (ConfigError const& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (DataError const& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (NumericalError const& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (std::invalid_argument const& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (fs::filesystem_error const& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace dsf::cli
