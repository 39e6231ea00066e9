#include "dsf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include <Eigen/SparseCore>

#include "dsf/errors.hpp"

namespace dsf {

SparseOperator::SparseOperator(int dim, std::vector<SparseEntry> entries, bool symmetric)
    : dim_(dim), symmetric_(symmetric) {
    for (auto const& e : entries) {
        if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim)
            throw std::invalid_argument("SparseOperator: entry index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](SparseEntry const& a, SparseEntry const& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    row_ptr_.assign(static_cast<std::size_t>(dim) + 1, 0);
    for (std::size_t n = 0; n < entries.size(); ++n) {
        auto const& e = entries[n];
        if (!col_.empty() && n > 0 && entries[n - 1].row == e.row && entries[n - 1].col == e.col) {
            values_.back() += e.value;
            continue;
        }
        col_.push_back(e.col);
        values_.push_back(e.value);
        ++row_ptr_[static_cast<std::size_t>(e.row) + 1];
    }
    for (int i = 0; i < dim; ++i) row_ptr_[i + 1] += row_ptr_[i];
    if (symmetric && !is_structurally_symmetric(1e-14))
        throw std::invalid_argument("SparseOperator: symmetric flag set on a non-symmetric operator");
}

double SparseOperator::coeff(int row, int col) const {
    auto const begin = col_.begin() + row_ptr_[row];
    auto const end = col_.begin() + row_ptr_[row + 1];
    auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - col_.begin())];
}

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CsrMap = Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>>;

CsrMap as_csr(int dim, std::vector<int> const& row_ptr, std::vector<int> const& col, std::vector<double> const& values) {
    return CsrMap(dim, dim, static_cast<Eigen::Index>(values.size()), row_ptr.data(), col.data(), values.data());
}

} // namespace

Eigen::MatrixXd SparseOperator::multiply(Eigen::MatrixXd const& x) const {
    if (x.rows() != dim_) throw std::invalid_argument("SparseOperator::multiply: row count mismatch");
    // row-major operands let each non-zero update a contiguous row
    RowMajorMatrix const xr = x;
    RowMajorMatrix const yr = as_csr(dim_, row_ptr_, col_, values_) * xr;
    return yr;
}

Eigen::MatrixXd SparseOperator::transpose_multiply(Eigen::MatrixXd const& x) const {
    if (x.rows() != dim_) throw std::invalid_argument("SparseOperator::transpose_multiply: row count mismatch");
    RowMajorMatrix const xr = x;
    RowMajorMatrix const yr = as_csr(dim_, row_ptr_, col_, values_).transpose() * xr;
    return yr;
}

Eigen::MatrixXd SparseOperator::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d(i, col_[p]) = values_[p];
    return d;
}

bool SparseOperator::is_structurally_symmetric(double tol) const {
    for (int i = 0; i < dim_; ++i) {
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            double const mirrored = coeff(col_[p], i);
            if (std::abs(mirrored - values_[p]) > tol) return false;
            if (mirrored == 0.0 && values_[p] != 0.0) return false;
        }
    }
    return true;
}

std::vector<int> Graph::degrees() const {
    std::vector<int> d(static_cast<std::size_t>(num_nodes_));
    for (int i = 0; i < num_nodes_; ++i) d[i] = degree(i);
    return d;
}

Graph build_graph(std::vector<Edge> const& edge_list, int num_nodes, Eigen::MatrixXd features,
                  std::vector<int> labels, int class_count) {
    if (num_nodes < 0) throw DataError("build_graph: negative node count");
    if (class_count < 1) throw DataError("build_graph: class count must be positive");
    if (features.rows() != num_nodes)
        throw DataError("build_graph: feature rows (" + std::to_string(features.rows()) +
                        ") != num_nodes (" + std::to_string(num_nodes) + ")");
    if (static_cast<int>(labels.size()) != num_nodes)
        throw DataError("build_graph: label count != num_nodes");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= class_count)
            throw DataError("build_graph: label " + std::to_string(labels[i]) + " of node " +
                            std::to_string(i) + " outside [0, " + std::to_string(class_count) + ")");
    }

    std::vector<Edge> canon;
    canon.reserve(edge_list.size());
    for (auto const& [a, b] : edge_list) {
        if (a < 0 || a >= num_nodes || b < 0 || b >= num_nodes)
            throw DataError("build_graph: edge (" + std::to_string(a) + ", " + std::to_string(b) +
                            ") references a node outside [0, " + std::to_string(num_nodes) + ")");
        if (a == b) continue;
        canon.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    Graph g;
    g.num_nodes_ = num_nodes;
    g.class_count_ = class_count;
    g.edges_ = std::move(canon);
    g.adjacency_.assign(static_cast<std::size_t>(num_nodes), {});
    for (auto const& [a, b] : g.edges_) {
        g.adjacency_[a].push_back(b);
        g.adjacency_[b].push_back(a);
    }
    for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());
    g.features_ = std::move(features);
    g.labels_ = std::move(labels);
    return g;
}

Graph build_graph(std::vector<Edge> const& edge_list, int num_nodes,
                  std::vector<std::vector<double>> const& feature_rows, std::vector<int> labels,
                  int class_count) {
    if (static_cast<int>(feature_rows.size()) != num_nodes)
        throw DataError("build_graph: feature rows != num_nodes");
    std::size_t const width = feature_rows.empty() ? 0 : feature_rows.front().size();
    Eigen::MatrixXd x(num_nodes, static_cast<Eigen::Index>(width));
    for (int i = 0; i < num_nodes; ++i) {
        if (feature_rows[i].size() != width)
            throw DataError("build_graph: ragged feature row " + std::to_string(i) + " (" +
                            std::to_string(feature_rows[i].size()) + " values, expected " +
                            std::to_string(width) + ")");
        for (std::size_t j = 0; j < width; ++j) x(i, static_cast<Eigen::Index>(j)) = feature_rows[i][j];
    }
    return build_graph(edge_list, num_nodes, std::move(x), std::move(labels), class_count);
}

NormalizedOperators normalized_operators(Graph const& g) {
    int const n = g.num_nodes();
    std::vector<double> inv_sqrt(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        int const d = g.degree(i);
        if (d > 0) inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(d));
    }
    std::vector<SparseEntry> adj;
    std::vector<SparseEntry> lap;
    adj.reserve(2 * g.num_edges());
    lap.reserve(2 * g.num_edges() + static_cast<std::size_t>(n));
    for (auto const& [a, b] : g.edges()) {
        double const w = inv_sqrt[a] * inv_sqrt[b];
        adj.push_back({a, b, w});
        adj.push_back({b, a, w});
        lap.push_back({a, b, -w});
        lap.push_back({b, a, -w});
    }
    for (int i = 0; i < n; ++i) lap.push_back({i, i, 1.0});
    return {SparseOperator(n, std::move(adj), true), SparseOperator(n, std::move(lap), true)};
}

SparseOperator random_walk_operator(Graph const& g) {
    std::vector<SparseEntry> rw;
    rw.reserve(2 * g.num_edges());
    for (auto const& [a, b] : g.edges()) {
        // (A D^{-1})_{ab} = A_ab / deg_b
        rw.push_back({a, b, 1.0 / g.degree(b)});
        rw.push_back({b, a, 1.0 / g.degree(a)});
    }
    return SparseOperator(g.num_nodes(), std::move(rw), false);
}

double edge_homophily(Graph const& g) {
    if (g.num_edges() == 0) throw NumericalError("edge_homophily: graph has no edges");
    std::size_t same = 0;
    for (auto const& [a, b] : g.edges())
        if (g.label(a) == g.label(b)) ++same;
    return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

Neighborhood k_hop(Graph const& g, int i, int k) {
    int const n = g.num_nodes();
    if (i < 0 || i >= n) throw std::out_of_range("k_hop: node " + std::to_string(i) + " out of range");
    if (k < 0) throw std::invalid_argument("k_hop: negative hop count");

    std::vector<int> dist(static_cast<std::size_t>(n), -1);
    std::vector<int> visited{i};
    std::queue<int> frontier;
    dist[i] = 0;
    frontier.push(i);
    while (!frontier.empty()) {
        int const u = frontier.front();
        frontier.pop();
        if (dist[u] == k) continue;
        for (int v : g.neighbors(u)) {
            if (dist[v] >= 0) continue;
            dist[v] = dist[u] + 1;
            visited.push_back(v);
            frontier.push(v);
        }
    }
    std::sort(visited.begin(), visited.end());

    Neighborhood out;
    out.nodes = visited;
    for (int u : visited) {
        for (int v : g.neighbors(u))
            if (u < v && dist[v] >= 0) out.edges.emplace_back(u, v);
    }
    return out;
}

std::optional<double> local_label_homophily(Graph const& g, int i, int k) {
    auto const hood = k_hop(g, i, k);
    if (hood.edges.empty()) return std::nullopt;
    std::size_t same = 0;
    for (auto const& [a, b] : hood.edges)
        if (g.label(a) == g.label(b)) ++same;
    return static_cast<double>(same) / static_cast<double>(hood.edges.size());
}

} // namespace dsf
