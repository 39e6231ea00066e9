#include <doctest.h>

#include "dsf/errors.hpp"
#include "dsf/graph.hpp"
#include "fixtures.hpp"

using namespace dsf;

namespace {

Graph unlabeled(std::vector<Edge> const& edges, int n) {
    return build_graph(edges, n, Eigen::MatrixXd::Zero(n, 1), std::vector<int>(static_cast<std::size_t>(n), 0), 1);
}

} // namespace

TEST_CASE("build_graph symmetrizes, deduplicates and strips self-loops") {
    Graph const g = unlabeled({{0, 1}, {1, 0}, {1, 1}}, 2);
    REQUIRE(g.num_edges() == 1);
    CHECK(g.edges()[0] == Edge{0, 1});
    CHECK(g.neighbors(0) == std::vector<int>{1});
    CHECK(g.neighbors(1) == std::vector<int>{0});
}

TEST_CASE("empty edge list gives isolated nodes") {
    Graph const g = unlabeled({}, 3);
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 0);
    for (int i = 0; i < 3; ++i) CHECK(g.degree(i) == 0);
}

TEST_CASE("path degrees") {
    Graph const g = unlabeled({{0, 1}, {1, 2}}, 3);
    CHECK(g.degrees() == std::vector<int>{1, 2, 1});
}

TEST_CASE("build_graph rejects malformed input") {
    CHECK_THROWS_AS(unlabeled({{0, 3}}, 3), DataError);
    CHECK_THROWS_AS(unlabeled({{-1, 0}}, 3), DataError);
    CHECK_THROWS_AS(build_graph({}, 2, Eigen::MatrixXd::Zero(3, 1), {0, 0}, 1), DataError);
    CHECK_THROWS_AS(build_graph({}, 2, Eigen::MatrixXd::Zero(2, 1), {0, 2}, 2), DataError);
    std::vector<std::vector<double>> ragged{{1.0, 2.0}, {1.0}};
    CHECK_THROWS_AS(build_graph({}, 2, ragged, {0, 0}, 1), DataError);
}

TEST_CASE("normalized operators on K2") {
    auto const ops = normalized_operators(unlabeled({{0, 1}}, 2));
    Eigen::Matrix2d a;
    a << 0, 1, 1, 0;
    CHECK((ops.adjacency.to_dense() - a).norm() == doctest::Approx(0.0));
    Eigen::Matrix2d l;
    l << 1, -1, -1, 1;
    CHECK((ops.laplacian.to_dense() - l).norm() == doctest::Approx(0.0));
}

TEST_CASE("normalized adjacency of a triangle is A / 2") {
    auto const ops = normalized_operators(unlabeled({{0, 1}, {1, 2}, {0, 2}}, 3));
    Eigen::Matrix3d a = Eigen::Matrix3d::Constant(0.5);
    a.diagonal().setZero();
    CHECK((ops.adjacency.to_dense() - a).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("isolated node keeps unit Laplacian diagonal and an empty row") {
    auto const ops = normalized_operators(unlabeled({{0, 1}}, 3));
    Eigen::MatrixXd const l = ops.laplacian.to_dense();
    CHECK(l(2, 2) == 1.0);
    CHECK(l(2, 0) == 0.0);
    CHECK(l(2, 1) == 0.0);
    CHECK(ops.adjacency.to_dense().row(2).norm() == 0.0);
}

TEST_CASE("sparse products match dense products") {
    Graph const g = test::random_graph(25, 0.2, 11);
    auto const ops = normalized_operators(g);
    SparseOperator const rw = random_walk_operator(g);
    Eigen::MatrixXd const x = Eigen::MatrixXd::Random(25, 4);
    CHECK((ops.adjacency.multiply(x) - ops.adjacency.to_dense() * x).norm() < 1e-12);
    CHECK((rw.multiply(x) - rw.to_dense() * x).norm() < 1e-12);
    CHECK((rw.transpose_multiply(x) - rw.to_dense().transpose() * x).norm() < 1e-12);
    CHECK(ops.adjacency.is_structurally_symmetric(1e-15));
}

TEST_CASE("random-walk operator columns are stochastic") {
    Graph const g = test::random_graph(30, 0.15, 5);
    Eigen::MatrixXd const rw = random_walk_operator(g).to_dense();
    for (int j = 0; j < g.num_nodes(); ++j) {
        if (g.degree(j) == 0) continue;
        CHECK(rw.col(j).sum() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("SparseOperator rejects a false symmetric flag") {
    CHECK_THROWS_AS(SparseOperator(2, {{0, 1, 1.0}}, true), std::invalid_argument);
}

TEST_CASE("edge homophily") {
    CHECK(edge_homophily(test::path_graph(3)) == 1.0);
    CHECK(edge_homophily(test::path_graph(3, {0, 0, 1})) == 0.5);
    CHECK_THROWS_AS(edge_homophily(unlabeled({}, 2)), NumericalError);
}

TEST_CASE("k-hop neighbourhoods") {
    Graph const path = test::path_graph(3);
    auto const zero = k_hop(path, 1, 0);
    CHECK(zero.nodes == std::vector<int>{1});
    CHECK(zero.edges.empty());
    auto const one = k_hop(path, 1, 1);
    CHECK(one.nodes == std::vector<int>{0, 1, 2});
    CHECK(one.edges == std::vector<Edge>{{0, 1}, {1, 2}});

    Graph const tri = unlabeled({{0, 1}, {1, 2}, {0, 2}}, 3);
    for (int i = 0; i < 3; ++i) {
        auto const h = k_hop(tri, i, 1);
        CHECK(h.nodes.size() == 3);
        CHECK(h.edges.size() == 3);
    }
    CHECK_THROWS_AS(k_hop(path, 3, 1), std::out_of_range);
}

TEST_CASE("k-hop induced edges exclude edges leaving the ball") {
    Graph const p5 = test::path_graph(5);
    auto const h = k_hop(p5, 0, 2);
    CHECK(h.nodes == std::vector<int>{0, 1, 2});
    CHECK(h.edges == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("local label homophily") {
    Graph const path = test::path_graph(3, {0, 0, 1});
    CHECK(*local_label_homophily(path, 1, 1) == 0.5);
    CHECK(*local_label_homophily(path, 0, 1) == 1.0);
    Graph const iso = unlabeled({{0, 1}}, 3);
    CHECK_FALSE(local_label_homophily(iso, 2, 2).has_value());
}
