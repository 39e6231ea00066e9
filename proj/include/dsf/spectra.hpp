#ifndef DSF_SPECTRA_HPP
#define DSF_SPECTRA_HPP

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dsf/graph.hpp"

namespace dsf {

/// Full eigendecomposition L = U diag(lambda) U^T, eigenvalues ascending.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors; ///< column n is u_n
};

inline constexpr int kDefaultDenseLimit = 20000;

/**
 * Dense symmetric eigensolver (Householder tridiagonalization + implicit QR).
 *
 * Each eigenvector is signed so its largest-magnitude entry is positive; among
 * entries tied in magnitude the lowest index decides. Throws std::invalid_argument
 * for a non-symmetric operator and ConfigError when dim() exceeds dense_limit.
 */
SpectralDecomposition eigendecompose(SparseOperator const& laplacian, int dense_limit = kDefaultDenseLimit);

/// Flips signs of the columns of u in place to the canonical convention above.
void canonicalize_signs(Eigen::MatrixXd& u);

/// Edge-sum form of u^T L u: sum over edges of (u_p/sqrt(deg_p) - u_q/sqrt(deg_q))^2.
double global_frequency(Graph const& g, Eigen::Ref<const Eigen::VectorXd> u);

/// Same sum restricted to the edges induced by the k-hop neighbourhood of i.
/// Degrees are global degrees.
double local_graph_frequency(Graph const& g, Eigen::Ref<const Eigen::VectorXd> u, int i, int k);

/// S = U^T X.
Eigen::MatrixXd fourier(Eigen::MatrixXd const& u, Eigen::MatrixXd const& x);
/// X = U S.
Eigen::MatrixXd inverse_fourier(Eigen::MatrixXd const& u, Eigen::MatrixXd const& s);

enum class FrequencyBand { Low, Mid, High };

FrequencyBand parse_frequency_band(std::string_view name);
std::string_view to_string(FrequencyBand band);

/// 0-based eigen index used for a band: 0, ceil(N/2)-1, N-1.
int band_eigen_index(FrequencyBand band, int num_nodes);

struct FrequencySample {
    int node;
    double value;
};

struct FrequencyHistogram {
    int eigen_index; ///< 1-based position in the ascending spectrum
    double lambda_global;
    int k;
    std::vector<FrequencySample> samples; ///< nodes with a non-empty k-hop edge set only
};

FrequencyHistogram frequency_histogram(Graph const& g, SpectralDecomposition const& spec, FrequencyBand band,
                                       int k);

} // namespace dsf

#endif // DSF_SPECTRA_HPP
