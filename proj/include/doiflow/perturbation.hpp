#pragma once

// Operator paths H(s) = H0 + Phi(s), the difference formula f(B) - f(A) as a
// double operator integral, the Daletskii-Krein derivative and its oracles.

#include <functional>
#include <string>
#include <vector>

#include "doiflow/doi.hpp"
#include "doiflow/kernels.hpp"
#include "doiflow/matrix.hpp"

namespace doiflow {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double s) const noexcept { return lo <= s && s <= hi; }
    [[nodiscard]] double length() const noexcept { return hi - lo; }
};

using HermitianFamily = std::function<HermitianMatrix(double)>;

class OperatorPath {
public:
    OperatorPath(HermitianMatrix h0, HermitianFamily phi, HermitianFamily phi_prime, Interval domain,
                 std::string descriptor);

    [[nodiscard]] const HermitianMatrix& h0() const noexcept { return h0_; }
    [[nodiscard]] HermitianMatrix phi(double s) const { return phi_(s); }
    [[nodiscard]] HermitianMatrix phi_prime(double s) const { return phi_prime_(s); }
    /// H(s) = H0 + Phi(s); no domain check.
    [[nodiscard]] HermitianMatrix hamiltonian(double s) const;
    [[nodiscard]] const Interval& domain() const noexcept { return domain_; }
    [[nodiscard]] const std::string& descriptor() const noexcept { return descriptor_; }
    [[nodiscard]] std::size_t dim() const noexcept { return h0_.dim(); }

    /// DomainError unless s lies in the domain.
    void require(double s) const;

    /// max over the samples of ||(Phi(s+h) - Phi(s-h))/2h - Phi'(s)||_op / h^2, h = 1e-4.
    [[nodiscard]] double derivative_defect_constant(std::span<const double> samples, double h = 1e-4) const;

private:
    HermitianMatrix h0_;
    HermitianFamily phi_;
    HermitianFamily phi_prime_;
    Interval domain_;
    std::string descriptor_;
};

/// Phi(s) = s V
OperatorPath linear_path(HermitianMatrix h0, HermitianMatrix v, Interval domain);
/// Phi(s) = sum_k s^{k+1} V_k
OperatorPath polynomial_path(HermitianMatrix h0, std::vector<HermitianMatrix> coefficients, Interval domain);
/// Phi(s) = sin(s) V1 + (1 - cos(s)) V2
OperatorPath trigonometric_path(HermitianMatrix h0, HermitianMatrix v1, HermitianMatrix v2, Interval domain);

struct FDifference {
    ComplexMatrix doi;     // int int phi_f dE_A Phi dF_B
    ComplexMatrix direct;  // f(B) - f(A)
    double residual = 0.0;
    double tolerance = 0.0;

    [[nodiscard]] bool ok() const noexcept { return residual <= tolerance; }
};

/// E from A (left), F from B = A + Phi (right).
FDifference f_difference(const HermitianMatrix& a, const HermitianMatrix& phi, const DifferentiableFunction& f);
/// Same with the measures interchanged: sum phi_f(y_j, x_i) Q_j Phi P_i.
ComplexMatrix f_difference_swapped(const HermitianMatrix& a, const HermitianMatrix& phi,
                                   const DifferentiableFunction& f);

struct ExpDifferenceBound {
    double lhs_norm = 0.0;
    double bound = 0.0;
    bool ok = false;
};

/// ||e^{itB} - e^{itA}||_op against |t| ||Phi||_op.
ExpDifferenceBound exp_difference_bound(const HermitianMatrix& a, const HermitianMatrix& phi, double t);

/// int int phi_f dE_s Phi'(s) dE_s with E_s the spectral measure of H(s).
ComplexMatrix dk_derivative(const OperatorPath& path, double s, const DifferentiableFunction& f);

/// 1e-4 (1 + |s|)
double default_fd_step(double s);

/// [f(H(s+h)) - f(H(s-h))]/2h
ComplexMatrix fd_derivative(const OperatorPath& path, double s, const DifferentiableFunction& f, double h);

/// int_0^1 i t e^{itrH(s)} Phi'(s) e^{it(1-r)H(s)} dr by Gauss-Legendre in r.
ComplexMatrix duhamel_derivative(const OperatorPath& path, double s, double t, std::size_t u_nodes = 64);

/// Smallest distance between distinct eigenvalues (0 for dim 1 is reported as +inf).
double min_eigen_gap(const EigenDecomposition& eig);

}  // namespace doiflow
