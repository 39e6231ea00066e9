#ifndef DSF_TESTS_ORACLES_HPP
#define DSF_TESTS_ORACLES_HPP

// Reference implementations kept deliberately independent of the library code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "dsf/graph.hpp"

namespace dsf::oracle {

struct Eigen2 {
    Eigen::VectorXd values;  ///< ascending
    Eigen::MatrixXd vectors; ///< columns, unit norm, unspecified sign
};

/// Cyclic Jacobi rotations on a dense symmetric matrix.
inline Eigen2 jacobi_eigen(Eigen::MatrixXd a, double tol = 1e-14, int max_sweeps = 100) {
    int const n = static_cast<int>(a.rows());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) < tol) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double const theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double const t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double const c = 1.0 / std::sqrt(t * t + 1.0);
                double const s = t * c;
                for (int k = 0; k < n; ++k) {
                    double const akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double const apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double const vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    Eigen2 out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int j = 0; j < n; ++j) {
        out.values(j) = a(order[j], order[j]);
        out.vectors.col(j) = v.col(order[j]);
    }
    return out;
}

/// Dense L = I - D^{-1/2} A D^{-1/2} built straight from the edge list.
inline Eigen::MatrixXd dense_laplacian(Graph const& g) {
    int const n = g.num_nodes();
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
    for (auto const& [a, b] : g.edges()) {
        double const w = 1.0 / std::sqrt(static_cast<double>(g.degree(a)) * g.degree(b));
        l(a, b) -= w;
        l(b, a) -= w;
    }
    return l;
}

inline double binom(double n, double k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

/// Closed-form basis values, without recurrences.
inline double monomial(int k, double lambda) { return std::pow(1.0 - lambda, k); }

inline double bernstein(int K, int k, double lambda) {
    return binom(K, k) * std::pow(2.0 - lambda, K - k) * std::pow(lambda, k) / std::pow(2.0, K);
}

/// Explicit sum form of P_n^{(a,b)}(x).
inline double jacobi_poly(int n, double a, double b, double x) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j)
        s += binom(n + a, n - j) * binom(n + b, j) * std::pow((x - 1.0) / 2.0, j) * std::pow((x + 1.0) / 2.0, n - j);
    return s;
}

inline double jacobi(int k, double a, double b, double lambda) { return jacobi_poly(k, a, b, 1.0 - lambda); }

/// Spectral-domain filter U diag(g(lambda)) U^T X.
inline Eigen::MatrixXd spectral_filter(Eigen2 const& e, std::function<double(double)> const& g, Eigen::MatrixXd const& x) {
    Eigen::VectorXd gl(e.values.size());
    for (Eigen::Index j = 0; j < gl.size(); ++j) gl(j) = g(e.values(j));
    return e.vectors * gl.asDiagonal() * e.vectors.transpose() * x;
}

/// Central finite difference of a scalar function with respect to every entry of `m`.
inline Eigen::MatrixXd finite_difference(Eigen::MatrixXd& m, std::function<double()> const& f, double h = 1e-4) {
    // five-point stencil: truncation error O(h^4), so h can stay large enough to keep rounding noise small
    Eigen::MatrixXd g(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double const keep = m(r, c);
            auto at = [&](double offset) {
                m(r, c) = keep + offset;
                return f();
            };
            double const d = -at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h);
            m(r, c) = keep;
            g(r, c) = d / (12.0 * h);
        }
    }
    return g;
}

/// Elementwise |a - b| / max(|a|, |b|, scale_floor); the floor keeps near-zero entries from dividing by rounding noise.
inline double max_relative_error(Eigen::MatrixXd const& a, Eigen::MatrixXd const& b, double scale_floor = 1e-6) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double const diff = std::abs(a.data()[i] - b.data()[i]);
        double const scale = std::max({std::abs(a.data()[i]), std::abs(b.data()[i]), scale_floor});
        worst = std::max(worst, diff / scale);
    }
    return worst;
}

} // namespace dsf::oracle

#endif // DSF_TESTS_ORACLES_HPP
