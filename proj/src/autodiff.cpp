#include "dsf/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dsf/errors.hpp"
#include "dsf/rng.hpp"

namespace dsf::ad {

Eigen::MatrixXd const& Value::data() const { return tape_->node(id_).data; }
bool Value::requires_grad() const { return tape_->node(id_).requires_grad; }

double Value::item() const {
    auto const& d = data();
    if (d.rows() != 1 || d.cols() != 1) throw std::invalid_argument("Value::item: not a 1x1 value");
    return d(0, 0);
}

Value Tape::leaf(Eigen::MatrixXd data, bool requires_grad) {
    auto n = std::make_unique<Node>();
    n->data = std::move(data);
    n->requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return Value(this, static_cast<int>(nodes_.size()) - 1);
}

Value Tape::record(Eigen::MatrixXd data, std::vector<Value> const& parents, BackwardFn backward) {
    bool needs = false;
    for (auto const& p : parents) {
        if (&p.tape() != this) throw std::invalid_argument("Tape: operands live on different tapes");
        needs = needs || p.requires_grad();
    }
    auto n = std::make_unique<Node>();
    n->data = std::move(data);
    n->requires_grad = needs;
    if (needs) n->backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Value(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::accumulate(Value v, Eigen::MatrixXd const& g) {
    Node& n = node(v.id());
    if (!n.requires_grad) return;
    if (g.rows() != n.data.rows() || g.cols() != n.data.cols())
        throw std::logic_error("Tape::accumulate: gradient shape mismatch");
    if (n.grad.size() == 0)
        n.grad = g;
    else
        n.grad += g;
}

void Tape::backward(Value loss) {
    if (&loss.tape() != this) throw std::invalid_argument("Tape::backward: value from another tape");
    if (backward_done_) throw std::logic_error("Tape::backward: already called; reset() the tape first");
    if (loss.rows() != 1 || loss.cols() != 1) throw std::invalid_argument("Tape::backward: loss must be 1x1");
    backward_done_ = true;
    if (!loss.requires_grad()) return;
    accumulate(loss, Eigen::MatrixXd::Ones(1, 1));
    for (int id = loss.id(); id >= 0; --id) {
        Node& n = node(id);
        if (!n.backward || n.grad.size() == 0) continue;
        // Copy: the rule may append to nodes_ in principle; grad stays stable either way.
        Eigen::MatrixXd const g = n.grad;
        n.backward(*this, g);
    }
}

Eigen::MatrixXd Tape::grad(Value v) const {
    Node const& n = node(v.id());
    if (n.grad.size() == 0) return Eigen::MatrixXd::Zero(n.data.rows(), n.data.cols());
    return n.grad;
}

bool Tape::has_grad(Value v) const { return node(v.id()).grad.size() != 0; }

void Tape::reset() {
    nodes_.clear();
    backward_done_ = false;
}

namespace {

void require_same_shape(Value a, Value b, char const* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
}

} // namespace

Value add(Value a, Value b) {
    require_same_shape(a, b, "add");
    return a.tape().record(a.data() + b.data(), {a, b}, [a, b](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(a, g);
        t.accumulate(b, g);
    });
}

Value sub(Value a, Value b) {
    require_same_shape(a, b, "sub");
    return a.tape().record(a.data() - b.data(), {a, b}, [a, b](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(a, g);
        t.accumulate(b, -g);
    });
}

Value add_bias(Value a, Value bias) {
    if (bias.rows() != 1 || (bias.cols() != a.cols() && bias.cols() != 1))
        throw std::invalid_argument("add_bias: bias must be 1 x cols or 1 x 1");
    Eigen::MatrixXd out = a.data();
    if (bias.cols() == 1)
        out.array() += bias.data()(0, 0);
    else
        out.rowwise() += bias.data().row(0);
    return a.tape().record(std::move(out), {a, bias}, [a, bias](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(a, g);
        if (bias.cols() == 1)
            t.accumulate(bias, Eigen::MatrixXd::Constant(1, 1, g.sum()));
        else
            t.accumulate(bias, g.colwise().sum());
    });
}

Value scalar_mul(Value a, double c) {
    return a.tape().record(c * a.data(), {a}, [a, c](Tape& t, Eigen::MatrixXd const& g) { t.accumulate(a, c * g); });
}

Value scale(Value s, Value a) {
    if (s.rows() != 1 || s.cols() != 1) throw std::invalid_argument("scale: scalar operand must be 1x1");
    double const sv = s.data()(0, 0);
    return a.tape().record(sv * a.data(), {s, a}, [s, a, sv](Tape& t, Eigen::MatrixXd const& g) {
        if (s.requires_grad()) t.accumulate(s, Eigen::MatrixXd::Constant(1, 1, g.cwiseProduct(a.data()).sum()));
        if (a.requires_grad()) t.accumulate(a, sv * g);
    });
}

Value matmul(Value a, Value b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.rows()) + ")");
    return a.tape().record(a.data() * b.data(), {a, b}, [a, b](Tape& t, Eigen::MatrixXd const& g) {
        if (a.requires_grad()) t.accumulate(a, g * b.data().transpose());
        if (b.requires_grad()) t.accumulate(b, a.data().transpose() * g);
    });
}

Value sparse_matmul(SparseOperator const& s, Value a) {
    if (s.dim() != a.rows()) throw std::invalid_argument("sparse_matmul: operator dimension != rows");
    SparseOperator const* op = &s;
    return a.tape().record(s.multiply(a.data()), {a}, [op, a](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(a, op->symmetric() ? op->multiply(g) : op->transpose_multiply(g));
    });
}

Value input_matmul(Eigen::SparseMatrix<double, Eigen::RowMajor> const& x, Value w) {
    if (x.cols() != w.rows()) throw std::invalid_argument("input_matmul: inner dimensions differ");
    auto const* xp = &x;
    Eigen::MatrixXd out = x * w.data();
    return w.tape().record(std::move(out), {w}, [xp, w](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(w, xp->transpose() * g);
    });
}

Value hadamard(Value a, Value b) {
    require_same_shape(a, b, "hadamard");
    return a.tape().record(a.data().cwiseProduct(b.data()), {a, b}, [a, b](Tape& t, Eigen::MatrixXd const& g) {
        if (a.requires_grad()) t.accumulate(a, g.cwiseProduct(b.data()));
        if (b.requires_grad()) t.accumulate(b, g.cwiseProduct(a.data()));
    });
}

Value row_scale(Value v, Value m) {
    if (v.cols() != 1 || v.rows() != m.rows()) throw std::invalid_argument("row_scale: need an N x 1 scale column");
    Eigen::MatrixXd out = v.data().col(0).asDiagonal() * m.data();
    return m.tape().record(std::move(out), {v, m}, [v, m](Tape& t, Eigen::MatrixXd const& g) {
        if (v.requires_grad()) t.accumulate(v, g.cwiseProduct(m.data()).rowwise().sum());
        if (m.requires_grad()) t.accumulate(m, v.data().col(0).asDiagonal() * g);
    });
}

Value sigmoid(Value a) {
    Eigen::MatrixXd y = a.data().unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    Eigen::MatrixXd local = y.array() * (1.0 - y.array());
    return a.tape().record(std::move(y), {a}, [a, local = std::move(local)](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(a, g.cwiseProduct(local));
    });
}

Value tanh(Value a) {
    Eigen::MatrixXd y = a.data().array().tanh().matrix();
    Eigen::MatrixXd local = 1.0 - y.array().square();
    return a.tape().record(std::move(y), {a}, [a, local = std::move(local)](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(a, g.cwiseProduct(local));
    });
}

Value relu(Value a) {
    Eigen::MatrixXd y = a.data().cwiseMax(0.0);
    return a.tape().record(std::move(y), {a}, [a](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(a, (a.data().array() > 0.0).select(g, 0.0).matrix());
    });
}

Value transpose(Value a) {
    return a.tape().record(a.data().transpose(), {a},
                           [a](Tape& t, Eigen::MatrixXd const& g) { t.accumulate(a, g.transpose()); });
}

Value dropout(Value a, double p, bool train, std::uint64_t seed) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout: p must lie in [0, 1)");
    if (!train || p == 0.0) return a;
    Eigen::MatrixXd mask(a.rows(), a.cols());
    double const keep_scale = 1.0 / (1.0 - p);
    // Row-major counter so masks do not depend on storage order.
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            auto const idx = static_cast<std::uint64_t>(r * a.cols() + c);
            mask(r, c) = CounterRng::at(seed, idx) >= p ? keep_scale : 0.0;
        }
    Eigen::MatrixXd out = a.data().cwiseProduct(mask);
    return a.tape().record(std::move(out), {a}, [a, mask = std::move(mask)](Tape& t, Eigen::MatrixXd const& g) {
        t.accumulate(a, g.cwiseProduct(mask));
    });
}

Eigen::MatrixXd row_softmax(Eigen::MatrixXd const& logits) {
    Eigen::MatrixXd p(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        double const mx = logits.row(r).maxCoeff();
        Eigen::RowVectorXd e = (logits.row(r).array() - mx).exp();
        p.row(r) = e / e.sum();
    }
    return p;
}

Value softmax_cross_entropy(Value logits, std::span<const int> targets, std::span<const int> rows) {
    if (static_cast<Eigen::Index>(targets.size()) != logits.rows())
        throw std::invalid_argument("softmax_cross_entropy: one target per row required");
    if (rows.empty()) throw std::invalid_argument("softmax_cross_entropy: empty mask");
    Eigen::Index const c = logits.cols();
    auto const& z = logits.data();
    double loss = 0.0;
    Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(z.rows(), c);
    for (int r : rows) {
        if (r < 0 || r >= z.rows()) throw std::out_of_range("softmax_cross_entropy: mask row out of range");
        int const y = targets[static_cast<std::size_t>(r)];
        if (y < 0 || y >= c) throw std::out_of_range("softmax_cross_entropy: target class out of range");
        double const mx = z.row(r).maxCoeff();
        double const lse = mx + std::log((z.row(r).array() - mx).exp().sum());
        loss += lse - z(r, y);
        probs.row(r) = (z.row(r).array() - lse).exp();
    }
    double const inv = 1.0 / static_cast<double>(rows.size());
    std::vector<int> rows_copy(rows.begin(), rows.end());
    std::vector<int> targets_copy(targets.begin(), targets.end());
    return logits.tape().record(
        Eigen::MatrixXd::Constant(1, 1, loss * inv), {logits},
        [logits, probs = std::move(probs), rows_copy = std::move(rows_copy), targets_copy = std::move(targets_copy),
         inv](Tape& t, Eigen::MatrixXd const& g) {
            Eigen::MatrixXd d = Eigen::MatrixXd::Zero(probs.rows(), probs.cols());
            for (int r : rows_copy) {
                d.row(r) = probs.row(r);
                d(r, targets_copy[static_cast<std::size_t>(r)]) -= 1.0;
            }
            t.accumulate(logits, (g(0, 0) * inv) * d);
        });
}

Value frobenius_sq(Value a) {
    return a.tape().record(Eigen::MatrixXd::Constant(1, 1, a.data().squaredNorm()), {a},
                           [a](Tape& t, Eigen::MatrixXd const& g) { t.accumulate(a, (2.0 * g(0, 0)) * a.data()); });
}

Value sum(Value a) {
    return a.tape().record(Eigen::MatrixXd::Constant(1, 1, a.data().sum()), {a},
                           [a](Tape& t, Eigen::MatrixXd const& g) {
                               t.accumulate(a, Eigen::MatrixXd::Constant(a.rows(), a.cols(), g(0, 0)));
                           });
}

namespace {

struct NormalizedColumns {
    Eigen::MatrixXd y;
    Eigen::VectorXd norms;
};

NormalizedColumns normalize_columns(Eigen::MatrixXd const& x) {
    if (x.rows() < 2) throw NumericalError("column_normalize: need at least two rows");
    NormalizedColumns out{x, Eigen::VectorXd(x.cols())};
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        out.y.col(c).array() -= out.y.col(c).mean();
        double const n = out.y.col(c).norm();
        if (!(n > 1e-12))
            throw NumericalError("column_normalize: column " + std::to_string(c) + " has zero variance");
        out.norms(c) = n;
        out.y.col(c) /= n;
    }
    return out;
}

} // namespace

Eigen::MatrixXd column_normalized(Eigen::MatrixXd const& x) { return normalize_columns(x).y; }

Value column_normalize(Value a) {
    auto nc = normalize_columns(a.data());
    Eigen::MatrixXd y = nc.y;
    return a.tape().record(std::move(y), {a},
                           [a, y = std::move(nc.y), norms = std::move(nc.norms)](Tape& t, Eigen::MatrixXd const& g) {
                               Eigen::MatrixXd dx(g.rows(), g.cols());
                               for (Eigen::Index c = 0; c < g.cols(); ++c) {
                                   // d(c/|c|) = (g - y (y.g)) / |c|, then project out the mean
                                   Eigen::VectorXd dc = (g.col(c) - y.col(c) * y.col(c).dot(g.col(c))) / norms(c);
                                   dx.col(c) = dc.array() - dc.mean();
                               }
                               t.accumulate(a, dx);
                           });
}

AdamState::AdamState(std::vector<AdamOptions> per_parameter) {
    slots.reserve(per_parameter.size());
    for (auto const& o : per_parameter) slots.push_back({o, {}, {}});
}

void adam_step(std::span<Eigen::MatrixXd* const> params, std::span<const Eigen::MatrixXd> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.slots.size())
        throw std::invalid_argument("adam_step: parameter, gradient and state counts differ");
    ++state.step;
    double const t = static_cast<double>(state.step);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Eigen::MatrixXd& w = *params[i];
        auto& slot = state.slots[i];
        auto const& o = slot.options;
        if (grads[i].rows() != w.rows() || grads[i].cols() != w.cols())
            throw std::invalid_argument("adam_step: gradient shape differs from parameter " + std::to_string(i));
        if (slot.m.size() == 0) {
            slot.m = Eigen::MatrixXd::Zero(w.rows(), w.cols());
            slot.v = Eigen::MatrixXd::Zero(w.rows(), w.cols());
        } else if (slot.m.rows() != w.rows() || slot.m.cols() != w.cols()) {
            throw std::invalid_argument("adam_step: parameter " + std::to_string(i) + " changed shape");
        }
        Eigen::MatrixXd g = grads[i];
        if (o.weight_decay != 0.0) g += o.weight_decay * w;
        slot.m = o.beta1 * slot.m + (1.0 - o.beta1) * g;
        slot.v = o.beta2 * slot.v + (1.0 - o.beta2) * g.cwiseAbs2();
        double const c1 = 1.0 - std::pow(o.beta1, t);
        double const c2 = 1.0 - std::pow(o.beta2, t);
        w.array() -= o.lr * (slot.m.array() / c1) / ((slot.v.array() / c2).sqrt() + o.eps);
    }
}

} // namespace dsf::ad
