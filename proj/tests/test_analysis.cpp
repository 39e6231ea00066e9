#include <doctest.h>

#include "dsf/analysis.hpp"
#include "dsf/errors.hpp"
#include "dsf/rng.hpp"
#include "fixtures.hpp"

using namespace dsf;

namespace {

Eigen::MatrixXd blobs(int per_blob, std::uint64_t seed) {
    CounterRng rng(seed);
    Eigen::MatrixXd x(2 * per_blob, 3);
    for (int i = 0; i < 2 * per_blob; ++i) {
        double const centre = i < per_blob ? -10.0 : 10.0;
        for (int j = 0; j < 3; ++j) x(i, j) = centre + rng.uniform(-1.0, 1.0);
    }
    return x;
}

} // namespace

TEST_CASE("identical rows collapse to one centroid") {
    Eigen::MatrixXd const x = Eigen::RowVector3d(0.2, -0.4, 1.0).replicate(12, 1);
    auto const cl = cluster_weights(x, 3, 1);
    for (int a : cl.assignments) CHECK(a == cl.assignments[0]);
    CHECK((cl.centroids.row(cl.assignments[0]) - x.row(0)).norm() < 1e-15);
    CHECK(cl.inertia == doctest::Approx(0.0));
}

TEST_CASE("two separated blobs") {
    Eigen::MatrixXd const x = blobs(20, 3);
    auto const cl = cluster_weights(x, 2, 7);
    for (int i = 1; i < 20; ++i) CHECK(cl.assignments[i] == cl.assignments[0]);
    for (int i = 21; i < 40; ++i) CHECK(cl.assignments[i] == cl.assignments[20]);
    CHECK(cl.assignments[0] != cl.assignments[20]);
    double within = 0.0;
    for (int b = 0; b < 2; ++b) {
        Eigen::MatrixXd const part = x.middleRows(20 * b, 20);
        Eigen::RowVectorXd const mean = part.colwise().mean();
        within += (part.rowwise() - mean).squaredNorm();
    }
    CHECK(cl.inertia == doctest::Approx(within).epsilon(1e-12));
}

TEST_CASE("clustering invariants") {
    CounterRng rng(9);
    Eigen::MatrixXd x(80, 4);
    for (int i = 0; i < 80; ++i)
        for (int j = 0; j < 4; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    auto const a = cluster_weights(x, 5, 3);
    auto const b = cluster_weights(x, 5, 3);
    CHECK(a.assignments == b.assignments);
    CHECK(a.centroids == b.centroids);
    for (std::size_t t = 1; t < a.inertia_history.size(); ++t)
        CHECK(a.inertia_history[t] <= a.inertia_history[t - 1] + 1e-12);
    CHECK(a.iterations <= 300);
    for (int c = 0; c < 5; ++c) {
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(4);
        int count = 0;
        for (int i = 0; i < 80; ++i)
            if (a.assignments[i] == c) {
                sum += x.row(i);
                ++count;
            }
        REQUIRE(count > 0);
        CHECK((a.centroids.row(c) - sum / count).norm() < 1e-12);
    }
    CHECK_THROWS_AS(cluster_weights(x.topRows(3), 4, 1), ConfigError);
    CHECK_THROWS_AS(cluster_weights(x, 0, 1), ConfigError);
}

TEST_CASE("centroid curves") {
    Eigen::VectorXd const grid = lambda_grid(101);
    WeightClustering zero;
    zero.k = 1;
    zero.centroids = Eigen::MatrixXd::Zero(1, 4);
    CHECK(centroid_curves(zero, BasisKind::monomial(3), grid).norm() == 0.0);

    WeightClustering ones;
    ones.k = 1;
    ones.centroids = Eigen::MatrixXd::Ones(1, 11);
    Eigen::MatrixXd const flat = centroid_curves(ones, BasisKind::bernstein(10), grid);
    CHECK((flat.array() - 1.0).abs().maxCoeff() < 1e-12);

    // the curve of a centroid is the mean of its members' curves
    CounterRng rng(2);
    Eigen::MatrixXd w(30, 6);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 6; ++j) w(i, j) = rng.uniform(-1.0, 1.0);
    BasisKind const kind = BasisKind::jacobi(5, 1.0, 1.0);
    auto const cl = cluster_weights(w, 3, 4);
    Eigen::MatrixXd const curves = centroid_curves(cl, kind, grid);
    for (int c = 0; c < 3; ++c) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(grid.size());
        int count = 0;
        for (int i = 0; i < 30; ++i)
            if (cl.assignments[i] == c) {
                mean += filter_response(w.row(i).transpose(), kind, grid);
                ++count;
            }
        mean /= count;
        CHECK((curves.row(c).transpose() - mean).cwiseAbs().maxCoeff() < 1e-10);
    }

    auto const single = cluster_weights(w, 1, 4);
    Eigen::VectorXd const mean_curve = filter_response(w.colwise().mean().transpose(), kind, grid);
    CHECK((centroid_curves(single, kind, grid).row(0).transpose() - mean_curve).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("homophily histogram") {
    Graph const uniform = test::path_graph(5);
    for (auto const& s : homophily_histogram(uniform)) CHECK(s.value == 1.0);

    auto const p3 = homophily_histogram(test::path_graph(3, {0, 0, 1}), 2);
    REQUIRE(p3.size() == 3);
    for (auto const& s : p3) CHECK(s.value == 0.5);

    std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}};
    Graph const g = build_graph(star, 4, Eigen::MatrixXd::Zero(4, 1), {1, 0, 0, 0}, 2);
    auto const h = homophily_histogram(g, 1);
    CHECK(h[0].node == 0);
    CHECK(h[0].value == 0.0);

    Graph const r = test::random_graph(40, 0.08, 6);
    auto const hist = homophily_histogram(r, 2);
    std::size_t pos = 0;
    for (int i = 0; i < 40; ++i) {
        auto const direct = local_label_homophily(r, i, 2);
        if (!direct) continue;
        REQUIRE(pos < hist.size());
        CHECK(hist[pos].node == i);
        CHECK(hist[pos].value == *direct);
        ++pos;
    }
    CHECK(pos == hist.size());
}

TEST_CASE("PCA projection") {
    Eigen::MatrixXd x(4, 3);
    x << 1, 0, 0, -1, 0, 0, 0, 0.5, 0, 0, -0.5, 0;
    Eigen::MatrixXd const p = pca_project(x);
    REQUIRE(p.cols() == 2);
    CHECK(std::abs(p(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(p(2, 1)) == doctest::Approx(0.5));
    CHECK(std::abs(p(0, 1)) < 1e-12);
    CHECK(pca_project(x) == p);
}
