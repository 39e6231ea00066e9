#include "dsf/model.hpp"

#include <algorithm>
#include <cmath>

#include "dsf/errors.hpp"
#include "dsf/rng.hpp"

namespace dsf {

std::string to_string(DsfMode m) { return m == DsfMode::I ? "I" : "R"; }

std::string to_string(Backbone b) {
    switch (b) {
    case Backbone::GPR: return "gpr";
    case Backbone::Bern: return "bern";
    case Backbone::Jacobi: return "jacobi";
    }
    return "?";
}

std::string to_string(PeInit p) { return p == PeInit::LapPE ? "lappe" : "rwpe"; }
std::string to_string(ThetaActivation a) { return a == ThetaActivation::Sigmoid ? "sigmoid" : "tanh"; }

std::string to_string(GammaInit g) {
    switch (g) {
    case GammaInit::PPR: return "ppr";
    case GammaInit::Uniform: return "uniform";
    case GammaInit::Random: return "random";
    }
    return "?";
}

void DsfConfig::validate() const {
    auto fail = [](std::string const& msg) { throw ConfigError("config: " + msg); };
    if (K < 0) fail("K must be >= 0");
    if (hidden < 1) fail("hidden must be >= 1");
    if (pe_dim < 1) fail("pe_dim must be >= 1");
    if (eta1 < 0.0 || eta1 > 1.0) fail("eta1 must lie in [0, 1]");
    if (eta2 < 0.0 || eta2 > 1.0) fail("eta2 must lie in [0, 1]");
    if (mode == DsfMode::R && eta2 != 0.0) fail("mode R requires eta2 = 0");
    if (lambda_orth < 0.0) fail("lambda_orth must be >= 0");
    if (dropout < 0.0 || dropout >= 1.0) fail("dropout must lie in [0, 1)");
    if (backbone == Backbone::Bern && sigma_p && *sigma_p != ThetaActivation::Sigmoid)
        fail("the bern backbone requires sigma_p = sigmoid");
    if (backbone == Backbone::Jacobi && (jacobi_a <= -1.0 || jacobi_b <= -1.0))
        fail("jacobi_a and jacobi_b must exceed -1");
    if (ppr_alpha <= 0.0 || ppr_alpha > 1.0) fail("ppr_alpha must lie in (0, 1]");
    if (lr < 0.0 || prop_lr < 0.0 || weight_decay < 0.0 || prop_wd < 0.0) fail("learning rates and decays must be >= 0");
    if (max_epochs < 1) fail("max_epochs must be >= 1");
    if (patience < 1) fail("patience must be >= 1");
}

ThetaActivation DsfConfig::theta_activation() const {
    if (sigma_p) return *sigma_p;
    return backbone == Backbone::Bern ? ThetaActivation::Sigmoid : ThetaActivation::Tanh;
}

BasisKind DsfConfig::basis() const {
    switch (backbone) {
    case Backbone::GPR: return BasisKind::monomial(K);
    case Backbone::Bern: return BasisKind::bernstein(K);
    case Backbone::Jacobi: return BasisKind::jacobi(K, jacobi_a, jacobi_b);
    }
    return BasisKind::monomial(K);
}

std::vector<DsfParams::Entry> DsfParams::active(DsfConfig const& cfg) {
    std::vector<Entry> out;
    out.push_back({"W_x", &W_x, false});
    out.push_back({"b_x", &b_x, false});
    if (cfg.uses_positions()) {
        out.push_back({"W_p", &W_p, true});
        out.push_back({"b_p", &b_p, true});
        if (cfg.mode == DsfMode::I && cfg.eta2 != 0.0) out.push_back({"W", &W, true});
    }
    out.push_back({"W_F", &W_F, false});
    out.push_back({"b_F", &b_F, false});
    if (cfg.uses_positions()) {
        int const first = cfg.backbone == Backbone::Jacobi ? 1 : 0;
        for (int k = first; k <= cfg.K; ++k) {
            out.push_back({"W_k." + std::to_string(k), &W_k[k], true});
            out.push_back({"b_k." + std::to_string(k), &b_k[k], true});
        }
    }
    if (!cfg.homogeneous && !cfg.ipe) out.push_back({"node_weights", &node_weights, true});
    bool const has_gamma = cfg.homogeneous || cfg.lgwd || cfg.backbone == Backbone::Jacobi;
    if (has_gamma && (cfg.homogeneous || cfg.ipe))
        for (int k = 0; k <= cfg.K; ++k) out.push_back({"gamma." + std::to_string(k), &gamma[k], true});
    return out;
}

std::vector<double> initial_gamma(DsfConfig const& cfg, std::uint64_t seed) {
    int const K = cfg.K;
    std::vector<double> g(static_cast<std::size_t>(K) + 1, 0.0);
    switch (cfg.backbone) {
    case Backbone::Bern:
        std::fill(g.begin(), g.end(), 0.5);
        break;
    case Backbone::Jacobi:
        std::fill(g.begin(), g.end(), 1.0);
        break;
    case Backbone::GPR:
        switch (cfg.gamma_init) {
        case GammaInit::PPR: {
            double const a = cfg.ppr_alpha;
            for (int k = 0; k <= K; ++k) g[k] = a * std::pow(1.0 - a, k);
            g[K] = std::pow(1.0 - a, K);
            break;
        }
        case GammaInit::Uniform:
            std::fill(g.begin(), g.end(), 1.0 / (K + 1));
            break;
        case GammaInit::Random: {
            CounterRng rng(derive_seed({seed, 0x67616d6dULL}));
            for (auto& v : g) v = rng.uniform(-0.5, 0.5);
            break;
        }
        }
        break;
    }
    return g;
}

namespace {

Eigen::MatrixXd glorot(int rows, int cols, CounterRng& rng) {
    double const bound = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXd m(rows, cols);
    // row-major draw order keeps values independent of storage layout
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
    return m;
}

} // namespace

DsfParams init_params(DsfConfig const& cfg, int num_features, int num_classes, int num_nodes, std::uint64_t seed) {
    cfg.validate();
    int const d = cfg.hidden;
    CounterRng rng(derive_seed({seed, 0x696e6974ULL}));
    DsfParams p;
    p.W_x = glorot(num_features, d, rng);
    p.b_x = Eigen::MatrixXd::Zero(1, d);
    p.W_p = glorot(cfg.pe_dim, d, rng);
    p.b_p = Eigen::MatrixXd::Zero(1, d);
    p.W = glorot(d, d, rng);
    p.W_F = glorot(d, num_classes, rng);
    p.b_F = Eigen::MatrixXd::Zero(1, num_classes);
    auto const g0 = initial_gamma(cfg, seed);
    for (int k = 0; k <= cfg.K; ++k) {
        p.W_k.push_back(glorot(d, 1, rng));
        p.b_k.push_back(Eigen::MatrixXd::Zero(1, 1));
        p.gamma.push_back(Eigen::MatrixXd::Constant(1, 1, g0[k]));
    }
    if (!cfg.ipe) {
        // free per-node weights start from the backbone's global initialisation
        p.node_weights.resize(num_nodes, cfg.K + 1);
        for (int k = 0; k <= cfg.K; ++k) p.node_weights.col(k).setConstant(g0[k]);
    }
    return p;
}

Eigen::MatrixXd init_positional(Graph const& g, PeInit kind, int f_p, SpectralDecomposition const* spec,
                                bool skip_first) {
    int const n = g.num_nodes();
    if (f_p < 1) throw ConfigError("init_positional: f_p must be >= 1");
    if (kind == PeInit::LapPE) {
        int const offset = skip_first ? 1 : 0;
        if (f_p + offset > n)
            throw ConfigError("init_positional: f_p = " + std::to_string(f_p) + " exceeds available eigenvectors");
        SpectralDecomposition local;
        if (spec == nullptr) {
            local = eigendecompose(normalized_operators(g).laplacian);
            spec = &local;
        }
        return spec->eigenvectors.middleCols(offset, f_p);
    }

    if (f_p > n) throw ConfigError("init_positional: f_p = " + std::to_string(f_p) + " exceeds N");
    SparseOperator const rw = random_walk_operator(g);
    Eigen::MatrixXd out(n, f_p);
    constexpr int kBlock = 256;
    for (int start = 0; start < n; start += kBlock) {
        int const width = std::min(kBlock, n - start);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, width);
        for (int c = 0; c < width; ++c) m(start + c, c) = 1.0;
        for (int step = 0; step < f_p; ++step) {
            m = rw.multiply(m);
            for (int c = 0; c < width; ++c) out(start + c, step) = m(start + c, c);
        }
    }
    return out;
}

ModelContext make_context(Graph const& g, DsfConfig const& cfg) {
    ModelContext ctx;
    ctx.graph = &g;
    ctx.ops = normalized_operators(g);
    if (cfg.uses_positions()) ctx.positional = init_positional(g, cfg.pe_init, cfg.pe_dim, nullptr, cfg.lap_skip_first);
    Eigen::MatrixXd const& x = g.features();
    if (x.size() > 0 && static_cast<double>((x.array() != 0.0).count()) < 0.3 * static_cast<double>(x.size()))
        ctx.sparse_features = x.sparseView();
    return ctx;
}

BoundParams bind_params(ad::Tape& tape, DsfParams& params, DsfConfig const& cfg) {
    BoundParams b;
    for (auto const& e : params.active(cfg)) {
        ad::Value v = tape.leaf(*e.value, true);
        b.leaves.emplace_back(e, v);
        std::string const& n = e.name;
        if (n == "W_x") b.W_x = v;
        else if (n == "b_x") b.b_x = v;
        else if (n == "W_p") b.W_p = v;
        else if (n == "b_p") b.b_p = v;
        else if (n == "W") b.W = v;
        else if (n == "W_F") b.W_F = v;
        else if (n == "b_F") b.b_F = v;
        else if (n == "node_weights") b.node_weights = v;
    }
    int const count = cfg.K + 1;
    b.W_k.resize(static_cast<std::size_t>(count));
    b.b_k.resize(static_cast<std::size_t>(count));
    b.gamma.resize(static_cast<std::size_t>(count));
    for (auto const& [e, v] : b.leaves) {
        auto const dot = e.name.find('.');
        if (dot == std::string::npos) continue;
        int const k = std::stoi(e.name.substr(dot + 1));
        std::string const head = e.name.substr(0, dot);
        if (head == "W_k") b.W_k[k] = v;
        else if (head == "b_k") b.b_k[k] = v;
        else if (head == "gamma") b.gamma[k] = v;
    }
    return b;
}

ad::Value ipe_step(ad::Value p, ad::Value xp_proj, SparseOperator const& adjacency, ad::Value w, double eta1,
                   double eta2) {
    if (eta1 == 1.0) return ad::tanh(xp_proj);
    ad::Value mixed = ad::sparse_matmul(adjacency, p);
    if (eta2 != 0.0) {
        ad::Value affinity = ad::sigmoid(ad::matmul(ad::matmul(p, w), ad::transpose(p)));
        mixed = ad::sub(ad::scalar_mul(mixed, 1.0 + eta2), ad::scalar_mul(ad::matmul(affinity, p), eta2));
    }
    if (eta1 == 0.0) return ad::tanh(mixed);
    return ad::tanh(ad::add(ad::scalar_mul(xp_proj, eta1), ad::scalar_mul(mixed, 1.0 - eta1)));
}

ad::Value node_theta(ad::Value p, ad::Value w_k, ad::Value b_k, ThetaActivation act) {
    ad::Value pre = ad::add_bias(ad::matmul(p, w_k), b_k);
    return act == ThetaActivation::Sigmoid ? ad::sigmoid(pre) : ad::tanh(pre);
}

ad::Value lgwd_beta(ad::Value gamma_k, ad::Value local, Backbone backbone) {
    if (backbone == Backbone::Bern) gamma_k = ad::relu(gamma_k);
    return ad::scale(gamma_k, local);
}

Eigen::MatrixXd ForwardResult::beta_matrix() const {
    if (beta.empty()) return {};
    Eigen::MatrixXd m(beta.front().rows(), static_cast<Eigen::Index>(beta.size()));
    for (std::size_t k = 0; k < beta.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = beta[k].data().col(0);
    return m;
}

namespace {

ad::Value column_of(ad::Value m, int k) {
    // m * e_k keeps the gradient path through the existing matmul rule
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m.cols(), 1);
    e(k, 0) = 1.0;
    return ad::matmul(m, m.tape().constant(std::move(e)));
}

} // namespace

ForwardResult forward(ad::Tape& tape, ModelContext const& ctx, DsfConfig const& cfg, BoundParams const& params,
                      bool train, DropoutSeeds seeds) {
    Graph const& g = *ctx.graph;
    int const n = g.num_nodes();
    ForwardResult out;

    ad::Value xw = ctx.sparse_features ? ad::input_matmul(*ctx.sparse_features, params.W_x)
                                       : ad::matmul(tape.constant(g.features()), params.W_x);
    ad::Value h0 = ad::relu(ad::add_bias(xw, params.b_x));
    h0 = ad::dropout(h0, cfg.dropout, train, seeds.hidden);

    auto adj = [&ctx](ad::Value v) { return ad::sparse_matmul(ctx.ops.adjacency, v); };
    auto lin = [](std::vector<std::pair<double, ad::Value>> const& terms) {
        ad::Value r = terms.front().first == 1.0 ? terms.front().second
                                                 : ad::scalar_mul(terms.front().second, terms.front().first);
        for (std::size_t j = 1; j < terms.size(); ++j) {
            auto const& [c, t] = terms[j];
            if (c == 1.0) r = ad::add(r, t);
            else if (c == -1.0) r = ad::sub(r, t);
            else r = ad::add(r, ad::scalar_mul(t, c));
        }
        return r;
    };
    std::vector<ad::Value> const terms = basis_terms<ad::Value>(cfg.basis(), h0, adj, lin);

    ad::Value ones = tape.constant(Eigen::MatrixXd::Ones(n, 1));
    ad::Value z;
    auto accumulate = [&](int k, ad::Value beta_k) {
        out.beta.push_back(beta_k);
        ad::Value term = ad::row_scale(beta_k, terms[static_cast<std::size_t>(k)]);
        z = k == 0 ? term : ad::add(z, term);
    };

    if (cfg.homogeneous) {
        for (int k = 0; k <= cfg.K; ++k) accumulate(k, lgwd_beta(params.gamma[k], ones, cfg.backbone));
    } else if (!cfg.ipe) {
        for (int k = 0; k <= cfg.K; ++k) {
            ad::Value col = column_of(params.node_weights, k);
            accumulate(k, cfg.backbone == Backbone::Bern ? ad::relu(col) : col);
        }
    } else {
        if (ctx.positional.rows() != n) throw std::logic_error("forward: context built without positional features");
        ThetaActivation const act = cfg.theta_activation();
        ad::Value xp = tape.constant(ctx.positional);
        ad::Value p = ad::tanh(ad::add_bias(ad::matmul(xp, params.W_p), params.b_p));
        p = ad::dropout(p, cfg.dropout, train, seeds.positional);
        ad::Value const xp_proj = p;
        ad::Value rho_product = ones;
        for (int k = 0; k <= cfg.K; ++k) {
            if (k > 0) p = ipe_step(p, xp_proj, ctx.ops.adjacency, params.W, cfg.eta1, cfg.eta2);
            ad::Value local;
            if (cfg.backbone == Backbone::Jacobi) {
                if (k > 0) rho_product = ad::hadamard(rho_product, node_theta(p, params.W_k[k], params.b_k[k], act));
                local = rho_product;
            } else {
                local = node_theta(p, params.W_k[k], params.b_k[k], act);
            }
            bool const global = cfg.lgwd || cfg.backbone == Backbone::Jacobi;
            accumulate(k, global ? lgwd_beta(params.gamma[k], local, cfg.backbone) : local);
        }
        out.positions = p;
    }

    out.logits = ad::add_bias(ad::matmul(z, params.W_F), params.b_F);
    return out;
}

ad::Value orth_regularizer(ad::Value positions) {
    ad::Value p_hat = ad::column_normalize(positions);
    ad::Value gram = ad::matmul(ad::transpose(p_hat), p_hat);
    ad::Value eye = positions.tape().constant(Eigen::MatrixXd::Identity(positions.cols(), positions.cols()));
    return ad::frobenius_sq(ad::sub(gram, eye));
}

ad::Value total_loss(ad::Value logits, std::vector<int> const& targets, std::vector<int> const& train_rows,
                     DsfConfig const& cfg, ad::Value positions) {
    if (train_rows.empty()) throw std::invalid_argument("total_loss: empty training mask");
    ad::Value task = ad::softmax_cross_entropy(logits, targets, train_rows);
    if (cfg.mode != DsfMode::R || cfg.lambda_orth == 0.0 || !positions.valid()) return task;
    return ad::add(task, ad::scalar_mul(orth_regularizer(positions), cfg.lambda_orth));
}

} // namespace dsf
