#ifndef DSF_ANALYSIS_HPP
#define DSF_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dsf/graph.hpp"
#include "dsf/poly.hpp"

namespace dsf {

struct WeightClustering {
    int k = 0;
    std::vector<int> assignments;   ///< node -> cluster
    Eigen::MatrixXd centroids;      ///< k x (K+1), mean of members
    double inertia = 0.0;           ///< sum of squared distances to assigned centroid
    std::vector<double> inertia_history; ///< after every Lloyd iteration
    int iterations = 0;
};

/// k-means++ seeding then Lloyd iterations (at most `max_iter`), stopping once
/// assignments repeat. An emptied cluster is moved to the point farthest from
/// its current centroid. Throws ConfigError if k < 1 or N < k.
WeightClustering cluster_weights(Eigen::MatrixXd const& weights, int k, std::uint64_t seed, int max_iter = 300);

/// g(lambda) of each centroid sampled on `grid`; row c is the curve of cluster c.
Eigen::MatrixXd centroid_curves(WeightClustering const& clustering, BasisKind const& kind,
                                Eigen::VectorXd const& grid);

struct HomophilySample {
    int node;
    double value;
};

/// Local label homophily of every node with a non-empty k-hop edge set.
std::vector<HomophilySample> homophily_histogram(Graph const& g, int k_hops = 2);

/// Projection of centred rows onto the top-2 principal axes (N x 2). Axis signs
/// follow the same largest-entry-positive rule as eigenvectors.
Eigen::MatrixXd pca_project(Eigen::MatrixXd const& rows);

} // namespace dsf

#endif // DSF_ANALYSIS_HPP
