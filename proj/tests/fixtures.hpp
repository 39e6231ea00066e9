#ifndef DSF_TESTS_FIXTURES_HPP
#define DSF_TESTS_FIXTURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dsf/graph.hpp"
#include "dsf/rng.hpp"

namespace dsf::test {

/// Erdos-Renyi style graph with edge probability p, Gaussian features and uniform labels.
inline Graph random_graph(int n, double p, std::uint64_t seed, int features = 3, int classes = 3) {
    CounterRng rng(seed);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) edges.emplace_back(i, j);
    Eigen::MatrixXd x(n, features);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < features; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
    return build_graph(edges, n, std::move(x), std::move(labels), classes);
}

inline Graph path_graph(int n, std::vector<int> labels = {}) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    if (labels.empty()) labels.assign(static_cast<std::size_t>(n), 0);
    int const classes = labels.empty() ? 1 : *std::max_element(labels.begin(), labels.end()) + 1;
    return build_graph(edges, n, Eigen::MatrixXd::Ones(n, 1), std::move(labels), classes);
}

/**
 * Planted-partition benchmark in the spirit of small heterophilous web graphs:
 * a fraction `homophily` of edges join same-class nodes, the rest join
 * different classes. Sparse binary features carry a class signal.
 */
inline Graph planted_graph(int n, int classes, int features, int edges_target, double homophily,
                           std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[i] = i % classes;
    for (int i = n - 1; i > 0; --i) std::swap(labels[i], labels[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<Edge> edges;
    while (static_cast<int>(edges.size()) < edges_target) {
        int const a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        int const b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (a == b) continue;
        bool const same = labels[a] == labels[b];
        if (same != (rng.uniform() < homophily)) continue;
        edges.emplace_back(a, b);
    }
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, features);
    int const block = std::max(1, features / classes);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < features; ++j) {
            bool const informative = j / block == labels[i];
            if (rng.uniform() < (informative ? 0.08 : 0.02)) x(i, j) = 1.0;
        }
    }
    return build_graph(edges, n, std::move(x), std::move(labels), classes);
}

} // namespace dsf::test

#endif // DSF_TESTS_FIXTURES_HPP
