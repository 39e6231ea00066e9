#ifndef DSF_GRAPH_HPP
#define DSF_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dsf {

using Edge = std::pair<int, int>;

struct SparseEntry {
    int row;
    int col;
    double value;
};

/**
 * @brief Compressed-row sparse operator over N nodes.
 *
 * Graph operators (normalized adjacency, normalized Laplacian) are fixed data;
 * they never carry gradients.
 */
class SparseOperator {
public:
    SparseOperator() = default;

    /// Builds from (row, col, value) entries. Duplicate coordinates are summed.
    SparseOperator(int dim, std::vector<SparseEntry> entries, bool symmetric);

    int dim() const { return dim_; }
    bool symmetric() const { return symmetric_; }
    std::size_t nonzeros() const { return values_.size(); }

    std::span<const int> row_ptr() const { return row_ptr_; }
    std::span<const int> col_index() const { return col_; }
    std::span<const double> values() const { return values_; }

    /// Entry lookup; zero when absent.
    double coeff(int row, int col) const;

    /// Y = S * X for dense X with dim() rows.
    Eigen::MatrixXd multiply(Eigen::MatrixXd const& x) const;
    /// Y = S^T * X.
    Eigen::MatrixXd transpose_multiply(Eigen::MatrixXd const& x) const;

    Eigen::MatrixXd to_dense() const;

    /// True when (i,j) and (j,i) carry equal values for every stored entry.
    bool is_structurally_symmetric(double tol = 0.0) const;

private:
    int dim_ = 0;
    bool symmetric_ = false;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_;
    std::vector<double> values_;
};

/// Undirected, unweighted graph with node features and class labels. Immutable.
class Graph {
public:
    Graph() = default;

    int num_nodes() const { return num_nodes_; }
    int num_features() const { return static_cast<int>(features_.cols()); }
    int class_count() const { return class_count_; }

    /// Canonical edge list: (min, max) pairs sorted lexicographically.
    std::vector<Edge> const& edges() const { return edges_; }
    std::size_t num_edges() const { return edges_.size(); }

    std::vector<int> const& neighbors(int i) const { return adjacency_.at(static_cast<std::size_t>(i)); }
    int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
    std::vector<int> degrees() const;

    Eigen::MatrixXd const& features() const { return features_; }
    std::vector<int> const& labels() const { return labels_; }
    int label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }

private:
    friend Graph build_graph(std::vector<Edge> const&, int, Eigen::MatrixXd, std::vector<int>, int);

    int num_nodes_ = 0;
    int class_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
    Eigen::MatrixXd features_;
    std::vector<int> labels_;
};

/**
 * @brief Builds a graph from a raw edge list.
 *
 * Edges are symmetrized, deduplicated and stripped of self-loops. Throws
 * DataError on out-of-range node ids, labels outside [0, class_count), or a
 * feature/label count that does not match num_nodes.
 */
Graph build_graph(std::vector<Edge> const& edge_list, int num_nodes, Eigen::MatrixXd features,
                  std::vector<int> labels, int class_count);

/// Row-vector overload; throws DataError on ragged rows.
Graph build_graph(std::vector<Edge> const& edge_list, int num_nodes,
                  std::vector<std::vector<double>> const& feature_rows, std::vector<int> labels,
                  int class_count);

struct NormalizedOperators {
    SparseOperator adjacency; ///< D^{-1/2} A D^{-1/2}; isolated rows are zero.
    SparseOperator laplacian; ///< I - adjacency.
};

NormalizedOperators normalized_operators(Graph const& g);

/// Random-walk transition A D^{-1}; columns of isolated nodes are zero.
SparseOperator random_walk_operator(Graph const& g);

/// Fraction of edges joining equally-labelled nodes. Throws NumericalError on an empty edge set.
double edge_homophily(Graph const& g);

struct Neighborhood {
    std::vector<int> nodes;  ///< sorted, includes the centre
    std::vector<Edge> edges; ///< induced edges, canonical order
};

/// Nodes within hop distance <= k of i and the edges they induce.
Neighborhood k_hop(Graph const& g, int i, int k);

/// Same-label edge fraction inside k_hop(i, k); nullopt when the induced edge set is empty.
std::optional<double> local_label_homophily(Graph const& g, int i, int k);

} // namespace dsf

#endif // DSF_GRAPH_HPP
