#include "dsf/spectra.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dsf/errors.hpp"

namespace dsf {

void canonicalize_signs(Eigen::MatrixXd& u) {
    // Magnitudes within kTieTol of the maximum count as tied; the lowest index wins.
    constexpr double kTieTol = 1e-12;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        if (u.rows() == 0) return;
        double const peak = u.col(c).cwiseAbs().maxCoeff();
        Eigen::Index pick = 0;
        while (std::abs(u(pick, c)) < peak - kTieTol) ++pick;
        if (u(pick, c) < 0.0) u.col(c) = -u.col(c);
    }
}

SpectralDecomposition eigendecompose(SparseOperator const& laplacian, int dense_limit) {
    if (laplacian.dim() > dense_limit)
        throw ConfigError("eigendecompose: N = " + std::to_string(laplacian.dim()) + " exceeds dense limit " +
                          std::to_string(dense_limit));
    if (!laplacian.is_structurally_symmetric(1e-12))
        throw std::invalid_argument("eigendecompose: operator is not symmetric");

    SpectralDecomposition out;
    if (laplacian.dim() == 0) return out;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian.to_dense(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: QR iteration did not converge");
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    canonicalize_signs(out.eigenvectors);
    return out;
}

namespace {

double edge_term(Graph const& g, Eigen::Ref<const Eigen::VectorXd> const& u, int p, int q) {
    double const diff = u(p) / std::sqrt(static_cast<double>(g.degree(p))) -
                        u(q) / std::sqrt(static_cast<double>(g.degree(q)));
    return diff * diff;
}

} // namespace

double global_frequency(Graph const& g, Eigen::Ref<const Eigen::VectorXd> u) {
    if (u.size() != g.num_nodes()) throw std::invalid_argument("global_frequency: length mismatch");
    double s = 0.0;
    for (auto const& [p, q] : g.edges()) s += edge_term(g, u, p, q);
    return s;
}

double local_graph_frequency(Graph const& g, Eigen::Ref<const Eigen::VectorXd> u, int i, int k) {
    if (u.size() != g.num_nodes()) throw std::invalid_argument("local_graph_frequency: length mismatch");
    double s = 0.0;
    for (auto const& [p, q] : k_hop(g, i, k).edges) s += edge_term(g, u, p, q);
    return s;
}

Eigen::MatrixXd fourier(Eigen::MatrixXd const& u, Eigen::MatrixXd const& x) {
    if (u.rows() != x.rows()) throw std::invalid_argument("fourier: shape mismatch");
    return u.transpose() * x;
}

Eigen::MatrixXd inverse_fourier(Eigen::MatrixXd const& u, Eigen::MatrixXd const& s) {
    if (u.cols() != s.rows()) throw std::invalid_argument("inverse_fourier: shape mismatch");
    return u * s;
}

FrequencyBand parse_frequency_band(std::string_view name) {
    if (name == "low") return FrequencyBand::Low;
    if (name == "mid") return FrequencyBand::Mid;
    if (name == "high") return FrequencyBand::High;
    throw ConfigError("unknown frequency band '" + std::string(name) + "' (expected low, mid or high)");
}

std::string_view to_string(FrequencyBand band) {
    switch (band) {
    case FrequencyBand::Low: return "low";
    case FrequencyBand::Mid: return "mid";
    case FrequencyBand::High: return "high";
    }
    return "?";
}

int band_eigen_index(FrequencyBand band, int num_nodes) {
    if (num_nodes < 1) throw std::invalid_argument("band_eigen_index: empty graph");
    switch (band) {
    case FrequencyBand::Low: return 0;
    case FrequencyBand::Mid: return (num_nodes + 1) / 2 - 1;
    case FrequencyBand::High: return num_nodes - 1;
    }
    return 0;
}

FrequencyHistogram frequency_histogram(Graph const& g, SpectralDecomposition const& spec, FrequencyBand band,
                                       int k) {
    int const idx = band_eigen_index(band, g.num_nodes());
    FrequencyHistogram h;
    h.eigen_index = idx + 1;
    h.lambda_global = spec.eigenvalues(idx);
    h.k = k;
    Eigen::VectorXd const u = spec.eigenvectors.col(idx);
    for (int i = 0; i < g.num_nodes(); ++i) {
        auto const hood = k_hop(g, i, k);
        if (hood.edges.empty()) continue;
        double s = 0.0;
        for (auto const& [p, q] : hood.edges) s += edge_term(g, u, p, q);
        h.samples.push_back({i, s});
    }
    return h;
}

} // namespace dsf
