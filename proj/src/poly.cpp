#include "dsf/poly.hpp"

#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

#include "dsf/errors.hpp"

namespace dsf {

void BasisKind::validate() const {
    if (order < 0) throw std::invalid_argument("BasisKind: negative order");
    if (family == BasisFamily::Jacobi && (a <= -1.0 || b <= -1.0))
        throw std::invalid_argument("BasisKind: Jacobi parameters must exceed -1");
}

std::string to_string(BasisFamily family) {
    switch (family) {
    case BasisFamily::Monomial: return "monomial";
    case BasisFamily::Bernstein: return "bernstein";
    case BasisFamily::Jacobi: return "jacobi";
    }
    return "?";
}

BasisFamily parse_basis_family(std::string_view name) {
    if (name == "monomial" || name == "gpr") return BasisFamily::Monomial;
    if (name == "bernstein" || name == "bern") return BasisFamily::Bernstein;
    if (name == "jacobi") return BasisFamily::Jacobi;
    throw ConfigError("unknown basis '" + std::string(name) + "' (expected monomial, bernstein or jacobi)");
}

namespace {

auto scalar_adj(double lambda) {
    return [lambda](double t) { return (1.0 - lambda) * t; };
}

double scalar_lin(std::vector<std::pair<double, double>> const& terms) {
    double s = 0.0;
    for (auto const& [c, t] : terms) s += c * t;
    return s;
}

Eigen::MatrixXd dense_lin(std::vector<std::pair<double, Eigen::MatrixXd>> const& terms) {
    Eigen::MatrixXd r = terms.front().first * terms.front().second;
    for (std::size_t j = 1; j < terms.size(); ++j) r += terms[j].first * terms[j].second;
    return r;
}

} // namespace

Eigen::VectorXd basis_values(BasisKind const& kind, double lambda) {
    kind.validate();
    auto const v = basis_terms<double>(kind, 1.0, scalar_adj(lambda), scalar_lin);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double basis_eval(BasisKind const& kind, int k, double lambda) {
    if (k < 0 || k > kind.order)
        throw std::out_of_range("basis_eval: order " + std::to_string(k) + " outside [0, " +
                                std::to_string(kind.order) + "]");
    return basis_values(kind, lambda)(k);
}

CoefficientSet CoefficientSet::shared(Eigen::VectorXd alpha) {
    CoefficientSet c;
    c.shared_ = true;
    c.alpha_ = std::move(alpha);
    return c;
}

CoefficientSet CoefficientSet::per_node(Eigen::MatrixXd beta) {
    CoefficientSet c;
    c.shared_ = false;
    c.beta_ = std::move(beta);
    return c;
}

Eigen::VectorXd const& CoefficientSet::alpha() const {
    if (!shared_) throw std::invalid_argument("CoefficientSet: per-node coefficients have no shared vector");
    return alpha_;
}

Eigen::MatrixXd const& CoefficientSet::beta() const {
    if (shared_) throw std::invalid_argument("CoefficientSet: shared coefficients have no per-node matrix");
    return beta_;
}

std::vector<Eigen::MatrixXd> apply_basis(BasisKind const& kind, NormalizedOperators const& ops,
                                         Eigen::MatrixXd const& x) {
    kind.validate();
    if (x.rows() != ops.adjacency.dim()) throw std::invalid_argument("apply_basis: row count mismatch");
    auto adj = [&ops](Eigen::MatrixXd const& t) { return ops.adjacency.multiply(t); };
    return basis_terms<Eigen::MatrixXd>(kind, x, adj, dense_lin);
}

Eigen::MatrixXd mix_terms(std::vector<Eigen::MatrixXd> const& terms, Eigen::MatrixXd const& beta) {
    if (terms.empty()) throw std::invalid_argument("mix_terms: no terms");
    if (beta.cols() != static_cast<Eigen::Index>(terms.size()))
        throw std::invalid_argument("mix_terms: coefficient width != K+1");
    if (beta.rows() != terms.front().rows()) throw std::invalid_argument("mix_terms: row count mismatch");
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(terms.front().rows(), terms.front().cols());
    for (std::size_t k = 0; k < terms.size(); ++k)
        z += beta.col(static_cast<Eigen::Index>(k)).asDiagonal() * terms[k];
    return z;
}

Eigen::MatrixXd homogeneous_filter(CoefficientSet const& coeffs, BasisKind const& kind,
                                   NormalizedOperators const& ops, Eigen::MatrixXd const& x) {
    if (!coeffs.is_shared()) throw std::invalid_argument("homogeneous_filter: per-node coefficients given");
    if (coeffs.width() != kind.order + 1) throw std::invalid_argument("homogeneous_filter: need K+1 coefficients");
    // Broadcasting alpha into constant rows reuses the diverse mixing loop, which
    // keeps both filters bitwise identical on constant-row inputs.
    Eigen::MatrixXd const beta = Eigen::VectorXd::Ones(x.rows()) * coeffs.alpha().transpose();
    return mix_terms(apply_basis(kind, ops, x), beta);
}

Eigen::MatrixXd diverse_filter(CoefficientSet const& coeffs, BasisKind const& kind, NormalizedOperators const& ops,
                               Eigen::MatrixXd const& x) {
    if (coeffs.is_shared()) throw std::invalid_argument("diverse_filter: shared coefficients given");
    if (coeffs.beta().rows() != x.rows()) throw std::invalid_argument("diverse_filter: row count mismatch");
    if (coeffs.width() != kind.order + 1) throw std::invalid_argument("diverse_filter: need K+1 columns");
    return mix_terms(apply_basis(kind, ops, x), coeffs.beta());
}

Eigen::VectorXd rescale_coefficients(Eigen::VectorXd const& alpha, double xi, BasisKind const& kind) {
    kind.validate();
    int const m = kind.order + 1;
    if (alpha.size() != m) throw std::invalid_argument("rescale_coefficients: need K+1 coefficients");

    // basis[j, k] = P_k(x_j), power[j, k] = x_j^k at Chebyshev nodes mapped to [0, 2]
    Eigen::MatrixXd basis(m, m);
    Eigen::MatrixXd power(m, m);
    for (int j = 0; j < m; ++j) {
        double const xj = 1.0 + std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * m));
        basis.row(j) = basis_values(kind, xj).transpose();
        double p = 1.0;
        for (int k = 0; k < m; ++k, p *= xj) power(j, k) = p;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> const power_lu(power);
    Eigen::FullPivLU<Eigen::MatrixXd> const basis_lu(basis);
    if (!power_lu.isInvertible() || !basis_lu.isInvertible())
        throw NumericalError("rescale_coefficients: singular interpolation system");

    Eigen::VectorXd omega = power_lu.solve(basis * alpha);
    double s = 1.0;
    for (int k = 0; k < m; ++k, s *= xi) omega(k) *= s;
    return basis_lu.solve(power * omega);
}

Eigen::VectorXd filter_response(Eigen::VectorXd const& weights, BasisKind const& kind, Eigen::VectorXd const& grid) {
    if (weights.size() != kind.order + 1) throw std::invalid_argument("filter_response: need K+1 weights");
    Eigen::VectorXd g(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) g(j) = basis_values(kind, grid(j)).dot(weights);
    return g;
}

Eigen::VectorXd lambda_grid(int n) {
    if (n < 2) throw std::invalid_argument("lambda_grid: need at least two points");
    Eigen::VectorXd grid(n);
    for (int j = 0; j < n; ++j) grid(j) = 2.0 * j / (n - 1);
    return grid;
}

} // namespace dsf
