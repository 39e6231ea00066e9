#include "dsf/analysis.hpp"

#include <limits>

#include <Eigen/Eigenvalues>

#include "dsf/errors.hpp"
#include "dsf/rng.hpp"
#include "dsf/spectra.hpp"

namespace dsf {

namespace {

double sq_dist(Eigen::MatrixXd const& x, Eigen::Index i, Eigen::MatrixXd const& c, Eigen::Index j) {
    return (x.row(i) - c.row(j)).squaredNorm();
}

Eigen::MatrixXd plus_plus_seed(Eigen::MatrixXd const& x, int k, CounterRng& rng) {
    Eigen::Index const n = x.rows();
    Eigen::MatrixXd c(k, x.cols());
    c.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    Eigen::VectorXd d2(n);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = sq_dist(x, i, c, 0);
    for (int j = 1; j < k; ++j) {
        double const total = d2.sum();
        Eigen::Index pick = 0;
        if (total <= 0.0) {
            // all points coincide with chosen centres
            pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        } else {
            double target = rng.uniform() * total;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2(i);
                if (target < 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        c.row(j) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), sq_dist(x, i, c, j));
    }
    return c;
}

} // namespace

WeightClustering cluster_weights(Eigen::MatrixXd const& weights, int k, std::uint64_t seed, int max_iter) {
    Eigen::Index const n = weights.rows();
    if (k < 1) throw ConfigError("cluster_weights: k must be >= 1");
    if (n < k) throw ConfigError("cluster_weights: " + std::to_string(n) + " rows < k = " + std::to_string(k));

    CounterRng rng(derive_seed({seed, 0x6b6dULL}));
    WeightClustering out;
    out.k = k;
    out.centroids = plus_plus_seed(weights, k, rng);
    out.assignments.assign(static_cast<std::size_t>(n), -1);

    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(weights, i, out.centroids, 0);
            for (int j = 1; j < k; ++j) {
                double const d = sq_dist(weights, i, out.centroids, j);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            if (out.assignments[i] != best) changed = true;
            out.assignments[i] = best;
            inertia += best_d;
        }
        out.iterations = iter + 1;
        if (!changed && iter > 0) {
            out.inertia = inertia;
            out.inertia_history.push_back(inertia);
            break;
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, weights.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(out.assignments[i]) += weights.row(i);
            ++counts[out.assignments[i]];
        }
        for (int j = 0; j < k; ++j) {
            if (counts[j] > 0) {
                out.centroids.row(j) = sums.row(j) / counts[j];
                continue;
            }
            // reseed at the point farthest from its own centroid
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                double const d = sq_dist(weights, i, out.centroids, out.assignments[i]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            out.centroids.row(j) = weights.row(far);
        }
        inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) inertia += sq_dist(weights, i, out.centroids, out.assignments[i]);
        out.inertia = inertia;
        out.inertia_history.push_back(inertia);
    }
    return out;
}

Eigen::MatrixXd centroid_curves(WeightClustering const& clustering, BasisKind const& kind,
                                Eigen::VectorXd const& grid) {
    Eigen::MatrixXd out(clustering.centroids.rows(), grid.size());
    for (Eigen::Index c = 0; c < clustering.centroids.rows(); ++c)
        out.row(c) = filter_response(clustering.centroids.row(c).transpose(), kind, grid).transpose();
    return out;
}

std::vector<HomophilySample> homophily_histogram(Graph const& g, int k_hops) {
    std::vector<HomophilySample> out;
    for (int i = 0; i < g.num_nodes(); ++i)
        if (auto h = local_label_homophily(g, i, k_hops)) out.push_back({i, *h});
    return out;
}

Eigen::MatrixXd pca_project(Eigen::MatrixXd const& rows) {
    Eigen::Index const n = rows.rows();
    Eigen::MatrixXd centred = rows.rowwise() - rows.colwise().mean();
    Eigen::MatrixXd cov = centred.transpose() * centred;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::Index const m = cov.rows();
    Eigen::Index const comps = std::min<Eigen::Index>(2, m);
    Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(m, 2);
    for (Eigen::Index c = 0; c < comps; ++c) axes.col(c) = es.eigenvectors().col(m - 1 - c);
    canonicalize_signs(axes);
    Eigen::MatrixXd out = centred * axes;
    if (n == 0) return Eigen::MatrixXd(0, 2);
    return out;
}

} // namespace dsf
