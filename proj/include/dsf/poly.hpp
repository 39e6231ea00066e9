#ifndef DSF_POLY_HPP
#define DSF_POLY_HPP

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dsf/graph.hpp"

namespace dsf {

enum class BasisFamily { Monomial, Bernstein, Jacobi };

/**
 * @brief Polynomial basis P_0..P_K on the Laplacian spectrum [0, 2].
 *
 * Monomial:  P_k(l) = (1 - l)^k, i.e. powers of the normalized adjacency.
 * Bernstein: P_k(l) = 2^{-K} C(K,k) (2 - l)^{K-k} l^k.
 * Jacobi:    P_k(l) = P_k^{(a,b)}(1 - l).
 */
struct BasisKind {
    BasisFamily family = BasisFamily::Monomial;
    int order = 10; ///< K
    double a = 1.0; ///< Jacobi alpha, > -1
    double b = 1.0; ///< Jacobi beta, > -1

    static BasisKind monomial(int order) { return {BasisFamily::Monomial, order, 1.0, 1.0}; }
    static BasisKind bernstein(int order) { return {BasisFamily::Bernstein, order, 1.0, 1.0}; }
    static BasisKind jacobi(int order, double a, double b) { return {BasisFamily::Jacobi, order, a, b}; }

    /// Throws std::invalid_argument on a negative order or Jacobi parameters <= -1.
    void validate() const;
};

std::string to_string(BasisFamily family);
BasisFamily parse_basis_family(std::string_view name);

/// Jacobi three-term recurrence coefficients for degree n >= 2:
/// P_n = (c_x * x + c_1) P_{n-1} - c_2 P_{n-2}.
struct JacobiStep {
    double c_x;
    double c_1;
    double c_2;
};

inline JacobiStep jacobi_step(int n, double a, double b) {
    double const s = 2.0 * n + a + b;
    double const denom = 2.0 * n * (n + a + b) * (s - 2.0);
    return {(s - 1.0) * s * (s - 2.0) / denom, (s - 1.0) * (a * a - b * b) / denom,
            2.0 * (n + a - 1.0) * (n + b - 1.0) * s / denom};
}

/**
 * Shared recurrence producing [P_0(L) x, ..., P_K(L) x] for any value type T.
 *
 * `adj(t)` must return A_hat * t where A_hat = I - L (for scalars: (1 - l) * t).
 * `lin(terms)` must return sum_j c_j * t_j, accumulated left to right.
 * The same routine serves scalar evaluation, dense filtering and autodiff, so
 * all three agree term by term.
 */
template <class T, class Adj, class Lin>
std::vector<T> basis_terms(BasisKind const& kind, T const& x, Adj&& adj, Lin&& lin) {
    int const K = kind.order;
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(K) + 1);
    switch (kind.family) {
    case BasisFamily::Monomial: {
        out.push_back(x);
        for (int k = 1; k <= K; ++k) out.push_back(adj(out.back()));
        break;
    }
    case BasisFamily::Jacobi: {
        double const a = kind.a;
        double const b = kind.b;
        out.push_back(x);
        if (K >= 1) {
            T ax = adj(x);
            out.push_back(lin(std::vector<std::pair<double, T>>{{(a - b) / 2.0, x}, {(a + b + 2.0) / 2.0, ax}}));
        }
        for (int n = 2; n <= K; ++n) {
            auto const st = jacobi_step(n, a, b);
            T ap = adj(out[n - 1]);
            out.push_back(lin(std::vector<std::pair<double, T>>{
                {st.c_x, ap}, {st.c_1, out[n - 1]}, {-st.c_2, out[n - 2]}}));
        }
        break;
    }
    case BasisFamily::Bernstein: {
        // lap[j] = L^j x with L = I - A_hat
        std::vector<T> lap;
        lap.reserve(static_cast<std::size_t>(K) + 1);
        lap.push_back(x);
        for (int j = 1; j <= K; ++j) {
            T ap = adj(lap.back());
            lap.push_back(lin(std::vector<std::pair<double, T>>{{1.0, lap.back()}, {-1.0, ap}}));
        }
        double binom = 1.0; // C(K, k)
        for (int k = 0; k <= K; ++k) {
            // (2I - L)^{K-k} = (I + A_hat)^{K-k}
            T t = lap[k];
            for (int r = 0; r < K - k; ++r) {
                T ap = adj(t);
                t = lin(std::vector<std::pair<double, T>>{{1.0, t}, {1.0, ap}});
            }
            out.push_back(lin(std::vector<std::pair<double, T>>{{std::ldexp(binom, -K), t}}));
            binom = binom * (K - k) / (k + 1);
        }
        break;
    }
    }
    return out;
}

/// P_k(lambda). Throws std::out_of_range unless 0 <= k <= K.
double basis_eval(BasisKind const& kind, int k, double lambda);

/// All K+1 basis values at lambda.
Eigen::VectorXd basis_values(BasisKind const& kind, double lambda);

/// Filter weights: one shared vector (K+1) or one row per node (N x (K+1)).
class CoefficientSet {
public:
    static CoefficientSet shared(Eigen::VectorXd alpha);
    static CoefficientSet per_node(Eigen::MatrixXd beta);

    bool is_shared() const { return shared_; }
    int width() const { return static_cast<int>(shared_ ? alpha_.size() : beta_.cols()); }
    Eigen::VectorXd const& alpha() const;
    Eigen::MatrixXd const& beta() const;

private:
    bool shared_ = true;
    Eigen::VectorXd alpha_;
    Eigen::MatrixXd beta_;
};

/// [P_k(L) X]_{k=0..K} via sparse recurrences in the normalized adjacency.
std::vector<Eigen::MatrixXd> apply_basis(BasisKind const& kind, NormalizedOperators const& ops,
                                         Eigen::MatrixXd const& x);

/// Z = sum_k alpha_k P_k(L) X. Throws std::invalid_argument for per-node coefficients.
Eigen::MatrixXd homogeneous_filter(CoefficientSet const& coeffs, BasisKind const& kind,
                                   NormalizedOperators const& ops, Eigen::MatrixXd const& x);

/// Z = sum_k diag(beta_{k,.}) P_k(L) X.
Eigen::MatrixXd diverse_filter(CoefficientSet const& coeffs, BasisKind const& kind, NormalizedOperators const& ops,
                               Eigen::MatrixXd const& x);

/// Same mixing step as diverse_filter over precomputed basis terms.
Eigen::MatrixXd mix_terms(std::vector<Eigen::MatrixXd> const& terms, Eigen::MatrixXd const& beta);

/**
 * Coefficients beta with sum_k alpha_k P_k(xi * x) == sum_k beta_k P_k(x).
 *
 * Built constructively: interpolate at K+1 Chebyshev nodes on [0, 2] to get
 * power-series coefficients, scale the k-th by xi^k, and interpolate back into
 * the basis.
 */
Eigen::VectorXd rescale_coefficients(Eigen::VectorXd const& alpha, double xi, BasisKind const& kind);

/// g(lambda) = sum_k w_k P_k(lambda) on every grid point.
Eigen::VectorXd filter_response(Eigen::VectorXd const& weights, BasisKind const& kind, Eigen::VectorXd const& grid);

/// n evenly spaced points on [0, 2], endpoints included.
Eigen::VectorXd lambda_grid(int n);

} // namespace dsf

#endif // DSF_POLY_HPP
