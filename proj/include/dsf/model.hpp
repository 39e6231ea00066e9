#ifndef DSF_MODEL_HPP
#define DSF_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dsf/autodiff.hpp"
#include "dsf/graph.hpp"
#include "dsf/poly.hpp"
#include "dsf/spectra.hpp"

namespace dsf {

enum class DsfMode { I, R };
enum class Backbone { GPR, Bern, Jacobi };
enum class PeInit { LapPE, RWPE };
enum class ThetaActivation { Sigmoid, Tanh };
enum class GammaInit { PPR, Uniform, Random };

std::string to_string(DsfMode m);
std::string to_string(Backbone b);
std::string to_string(PeInit p);
std::string to_string(ThetaActivation a);
std::string to_string(GammaInit g);

/**
 * @brief Hyperparameters of one DSF model plus its training schedule.
 *
 * Every field maps to one key of the flat config file (see README).
 */
struct DsfConfig {
    // architecture
    int K = 10;
    int hidden = 64;          ///< d
    int pe_dim = 16;          ///< f_p, raw positional width
    double eta1 = 0.5;
    double eta2 = 0.0;
    double lambda_orth = 0.0;
    DsfMode mode = DsfMode::R;
    Backbone backbone = Backbone::GPR;
    PeInit pe_init = PeInit::RWPE;
    bool lap_skip_first = false; ///< drop the lambda = 0 eigenvector from LapPE
    double dropout = 0.5;
    std::optional<ThetaActivation> sigma_p; ///< unset: Sigmoid for Bern, Tanh otherwise
    GammaInit gamma_init = GammaInit::PPR;
    double ppr_alpha = 0.1;
    double jacobi_a = 1.0;
    double jacobi_b = 1.0;

    // variants
    bool homogeneous = false; ///< theta == 1: the plain backbone filter
    bool ipe = true;          ///< false: N x (K+1) free per-node weights
    bool lgwd = true;         ///< false: beta = theta without the global factor

    // optimisation
    double lr = 0.01;
    double weight_decay = 5e-4;
    double prop_lr = 0.01; ///< filter-weight and positional parameters
    double prop_wd = 0.0;
    int max_epochs = 1000;
    int patience = 100;

    /// Throws ConfigError on inconsistent settings (mode R with eta2 != 0,
    /// Bern with a Tanh theta activation, out-of-range values).
    void validate() const;

    ThetaActivation theta_activation() const;
    BasisKind basis() const;
    bool uses_positions() const { return !homogeneous && ipe; }
};

/// Trainable parameters. Unused groups for a variant stay empty.
struct DsfParams {
    Eigen::MatrixXd W_x; ///< f x d
    Eigen::MatrixXd b_x; ///< 1 x d
    Eigen::MatrixXd W_p; ///< f_p x d
    Eigen::MatrixXd b_p; ///< 1 x d
    Eigen::MatrixXd W;   ///< d x d, IPE mixing (mode I)
    Eigen::MatrixXd W_F; ///< d x C
    Eigen::MatrixXd b_F; ///< 1 x C
    std::vector<Eigen::MatrixXd> W_k;   ///< K+1 columns d x 1
    std::vector<Eigen::MatrixXd> b_k;   ///< K+1 scalars 1 x 1
    std::vector<Eigen::MatrixXd> gamma; ///< K+1 scalars 1 x 1
    Eigen::MatrixXd node_weights;       ///< N x (K+1), IPE ablation only

    struct Entry {
        std::string name;
        Eigen::MatrixXd* value;
        bool filter_group; ///< optimised with prop_lr / prop_wd
    };
    /// Parameters active for `cfg`, in a fixed order.
    std::vector<Entry> active(DsfConfig const& cfg);
};

/// Glorot-uniform weights, zero biases, gamma by cfg.gamma_init.
DsfParams init_params(DsfConfig const& cfg, int num_features, int num_classes, int num_nodes, std::uint64_t seed);

/// Initial gamma_0..gamma_K for a backbone and strategy.
std::vector<double> initial_gamma(DsfConfig const& cfg, std::uint64_t seed);

/**
 * Raw positional features X_p (N x f_p).
 * LapPE: entries of the f_p lowest-frequency eigenvectors (optionally skipping the first).
 * RWPE:  diagonals of RW^1..RW^{f_p} with RW = A D^{-1}.
 */
Eigen::MatrixXd init_positional(Graph const& g, PeInit kind, int f_p, SpectralDecomposition const* spec = nullptr,
                                bool skip_first = false);

/// Per-graph data reused across epochs and runs.
struct ModelContext {
    Graph const* graph = nullptr;
    NormalizedOperators ops;
    Eigen::MatrixXd positional; ///< X_p, empty when the variant does not use positions
    /// Sparse copy of X, filled when fewer than 30% of its entries are non-zero.
    std::optional<Eigen::SparseMatrix<double, Eigen::RowMajor>> sparse_features;
};

ModelContext make_context(Graph const& g, DsfConfig const& cfg);

/// Parameters bound as leaves on a tape.
struct BoundParams {
    std::vector<std::pair<DsfParams::Entry, ad::Value>> leaves;
    ad::Value W_x, b_x, W_p, b_p, W, W_F, b_F, node_weights;
    std::vector<ad::Value> W_k, b_k, gamma;
};

BoundParams bind_params(ad::Tape& tape, DsfParams& params, DsfConfig const& cfg);

/// One IPE update:
/// tanh(eta1 * Xp + (1 - eta1) * ((1 + eta2) A_hat - eta2 * sigmoid(P W P^T)) P).
/// The dense P W P^T term is skipped entirely when eta2 == 0.
ad::Value ipe_step(ad::Value p, ad::Value xp_proj, SparseOperator const& adjacency, ad::Value w, double eta1,
                   double eta2);

/// theta_{k,i} = sigma_p(W_k^T P_i + b_k), returned as an N x 1 column.
ad::Value node_theta(ad::Value p, ad::Value w_k, ad::Value b_k, ThetaActivation act);

/// beta_{k,.} = gamma_k * local. Bern rectifies gamma. For Jacobi `local` is
/// the cumulative product of theta_1..theta_k (an all-ones column at k = 0).
ad::Value lgwd_beta(ad::Value gamma_k, ad::Value local, Backbone backbone);

struct ForwardResult {
    ad::Value logits;         ///< N x C, pre-softmax
    ad::Value positions;      ///< P^(K); invalid when positions are not used
    std::vector<ad::Value> beta; ///< K+1 columns N x 1
    Eigen::MatrixXd beta_matrix() const;
};

/// Seeds for the two dropout masks of one training forward pass.
struct DropoutSeeds {
    std::uint64_t hidden = 0;
    std::uint64_t positional = 0;
};

ForwardResult forward(ad::Tape& tape, ModelContext const& ctx, DsfConfig const& cfg, BoundParams const& params,
                      bool train, DropoutSeeds seeds = {});

/// ||P_hat^T P_hat - I_d||_F^2 with P_hat the column-normalized positions.
ad::Value orth_regularizer(ad::Value positions);

/// Masked mean cross-entropy, plus lambda_orth * orth_regularizer in mode R.
ad::Value total_loss(ad::Value logits, std::vector<int> const& targets, std::vector<int> const& train_rows,
                     DsfConfig const& cfg, ad::Value positions);

} // namespace dsf

#endif // DSF_MODEL_HPP
