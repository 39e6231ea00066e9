#ifndef DSF_AUTODIFF_HPP
#define DSF_AUTODIFF_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dsf/graph.hpp"

namespace dsf::ad {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid until the tape is reset.
class Value {
public:
    Value() = default;

    Tape& tape() const { return *tape_; }
    int id() const { return id_; }
    bool valid() const { return tape_ != nullptr; }

    Eigen::MatrixXd const& data() const;
    Eigen::Index rows() const { return data().rows(); }
    Eigen::Index cols() const { return data().cols(); }
    bool requires_grad() const;

    /// Scalar payload of a 1x1 value.
    double item() const;

private:
    friend class Tape;
    Value(Tape* tape, int id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    int id_ = -1;
};

/**
 * @brief Reverse-mode tape over dense double matrices.
 *
 * Nodes are appended in creation order, which is a topological order, so the
 * backward pass is a single reverse sweep visiting each node once. A tape
 * supports one backward() per reset().
 */
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, Eigen::MatrixXd const& grad_out)>;

    Tape() = default;
    Tape(Tape const&) = delete;
    Tape& operator=(Tape const&) = delete;

    Value leaf(Eigen::MatrixXd data, bool requires_grad);
    Value constant(Eigen::MatrixXd data) { return leaf(std::move(data), false); }

    /// Registers an op result; `backward` runs only when some parent requires grad.
    Value record(Eigen::MatrixXd data, std::vector<Value> const& parents, BackwardFn backward);

    /// Accumulates d(loss)/d(node) into every reachable node that requires grad.
    /// Throws on a non-scalar loss or a second call without reset().
    void backward(Value loss);

    /// Gradient of a node; zero matrix of matching shape if none flowed in.
    Eigen::MatrixXd grad(Value v) const;
    bool has_grad(Value v) const;

    /// Adds into the gradient buffer of v (allocating on first use). Used by backward rules.
    void accumulate(Value v, Eigen::MatrixXd const& g);

    void reset();
    std::size_t size() const { return nodes_.size(); }

private:
    friend class Value;
    struct Node {
        Eigen::MatrixXd data;
        Eigen::MatrixXd grad; ///< empty until first accumulation
        bool requires_grad = false;
        BackwardFn backward;
    };
    Node const& node(int id) const { return *nodes_.at(static_cast<std::size_t>(id)); }
    Node& node(int id) { return *nodes_.at(static_cast<std::size_t>(id)); }

    std::vector<std::unique_ptr<Node>> nodes_;
    bool backward_done_ = false;
};

// ---- ops -----------------------------------------------------------------
// All operands must live on the same tape. Shape errors throw std::invalid_argument.

Value add(Value a, Value b);
Value sub(Value a, Value b);
/// a + broadcast(bias); bias is 1 x cols(a) or 1 x 1.
Value add_bias(Value a, Value bias);
Value scalar_mul(Value a, double c);
/// s * a for a learnable 1x1 scalar s.
Value scale(Value s, Value a);
Value matmul(Value a, Value b);
/// S * a for a fixed sparse operator; no gradient reaches S. `s` must outlive backward().
Value sparse_matmul(SparseOperator const& s, Value a);
/// x * w for a fixed sparse input matrix (no gradient to x). `x` must outlive backward().
Value input_matmul(Eigen::SparseMatrix<double, Eigen::RowMajor> const& x, Value w);
Value hadamard(Value a, Value b);
/// diag(v) * m with v an N x 1 column.
Value row_scale(Value v, Value m);
Value sigmoid(Value a);
Value tanh(Value a);
Value relu(Value a);
Value transpose(Value a);
/// Inverted dropout with a counter-based mask keyed by seed; identity when !train or p == 0.
Value dropout(Value a, double p, bool train, std::uint64_t seed);
/// Mean over `rows` of -log softmax(logits)[row, target[row]]; result 1x1.
Value softmax_cross_entropy(Value logits, std::span<const int> targets, std::span<const int> rows);
/// Squared Frobenius norm; result 1x1.
Value frobenius_sq(Value a);
/// Sum of all entries; result 1x1.
Value sum(Value a);
/// Each column shifted to zero mean and scaled to unit l2 norm. Zero-variance column -> NumericalError.
Value column_normalize(Value a);

/// Forward-only helpers shared with tests.
Eigen::MatrixXd column_normalized(Eigen::MatrixXd const& x);
Eigen::MatrixXd row_softmax(Eigen::MatrixXd const& logits);

// ---- optimizer -----------------------------------------------------------

struct AdamOptions {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0; ///< L2 term added to the gradient
};

struct AdamSlot {
    AdamOptions options;
    Eigen::MatrixXd m;
    Eigen::MatrixXd v;
};

/// Bias-corrected Adam state, one slot per parameter in a fixed order.
struct AdamState {
    std::vector<AdamSlot> slots;
    long step = 0;

    AdamState() = default;
    explicit AdamState(std::vector<AdamOptions> per_parameter);
};

/// One Adam update. Moments are created lazily on the first step; any later
/// shape change throws std::invalid_argument.
void adam_step(std::span<Eigen::MatrixXd* const> params, std::span<const Eigen::MatrixXd> grads, AdamState& state);

} // namespace dsf::ad

#endif // DSF_AUTODIFF_HPP
