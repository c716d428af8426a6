#include "doiflow/perturbation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "doiflow/quadrature.hpp"

namespace doiflow {

OperatorPath::OperatorPath(HermitianMatrix h0, HermitianFamily phi, HermitianFamily phi_prime, Interval domain,
                           std::string descriptor)
    : h0_(std::move(h0)),
      phi_(std::move(phi)),
      phi_prime_(std::move(phi_prime)),
      domain_(domain),
      descriptor_(std::move(descriptor)) {
    if (!(domain_.lo <= domain_.hi)) throw InvalidInput("path domain must be a nonempty interval");
}

HermitianMatrix OperatorPath::hamiltonian(double s) const { return HermitianMatrix(h0_.matrix() + phi_(s).matrix()); }

void OperatorPath::require(double s) const {
    if (!domain_.contains(s)) {
        std::ostringstream os;
        os << "s = " << s << " outside the path domain [" << domain_.lo << ", " << domain_.hi << "]";
        throw DomainError(os.str());
    }
}

double OperatorPath::derivative_defect_constant(std::span<const double> samples, double h) const {
    double worst = 0.0;
    for (double s : samples) {
        ComplexMatrix fd = phi_(s + h).matrix() - phi_(s - h).matrix();
        fd *= 1.0 / (2.0 * h);
        worst = std::max(worst, op_norm(fd - phi_prime_(s).matrix()) / (h * h));
    }
    return worst;
}

OperatorPath linear_path(HermitianMatrix h0, HermitianMatrix v, Interval domain) {
    auto phi = [v](double s) { return s * v; };
    auto phi_prime = [v](double) { return v; };
    return {std::move(h0), phi, phi_prime, domain, "linear"};
}

OperatorPath polynomial_path(HermitianMatrix h0, std::vector<HermitianMatrix> coefficients, Interval domain) {
    if (coefficients.empty()) throw InvalidInput("polynomial path needs at least one coefficient");
    auto phi = [c = coefficients](double s) {
        ComplexMatrix m(c.front().dim(), c.front().dim());
        double power = s;
        for (const auto& v : c) {
            m.add_scaled(power, v.matrix());
            power *= s;
        }
        return HermitianMatrix(m);
    };
    auto phi_prime = [c = coefficients](double s) {
        ComplexMatrix m(c.front().dim(), c.front().dim());
        double power = 1.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            m.add_scaled(static_cast<double>(k + 1) * power, c[k].matrix());
            power *= s;
        }
        return HermitianMatrix(m);
    };
    return {std::move(h0), phi, phi_prime, domain, "polynomial"};
}

OperatorPath trigonometric_path(HermitianMatrix h0, HermitianMatrix v1, HermitianMatrix v2, Interval domain) {
    auto phi = [v1, v2](double s) {
        ComplexMatrix m = std::sin(s) * v1.matrix();
        m.add_scaled(1.0 - std::cos(s), v2.matrix());
        return HermitianMatrix(m);
    };
    auto phi_prime = [v1, v2](double s) {
        ComplexMatrix m = std::cos(s) * v1.matrix();
        m.add_scaled(std::sin(s), v2.matrix());
        return HermitianMatrix(m);
    };
    return {std::move(h0), phi, phi_prime, domain, "trigonometric"};
}

FDifference f_difference(const HermitianMatrix& a, const HermitianMatrix& phi, const DifferentiableFunction& f) {
    if (a.dim() != phi.dim()) throw ShapeError("f_difference: A and Phi dimensions differ");
    const HermitianMatrix b(a.matrix() + phi.matrix());
    const auto eig_a = hermitian_eig(a);
    const auto eig_b = hermitian_eig(b);
    const FinitePVM e = pvm_from_eigen(eig_a);
    const FinitePVM fb = pvm_from_eigen(eig_b);

    FDifference out;
    out.doi = doi_apply(divided_difference_kernel(f), e, fb, phi.matrix());
    const ComplexMatrix f_b = matrix_function(eig_b, f.value);
    const ComplexMatrix f_a = matrix_function(eig_a, f.value);
    out.direct = f_b - f_a;
    out.residual = op_norm(out.doi - out.direct);
    out.tolerance = 1e-8 * (1.0 + op_norm(f_b) + op_norm(f_a));
    return out;
}

ComplexMatrix f_difference_swapped(const HermitianMatrix& a, const HermitianMatrix& phi,
                                   const DifferentiableFunction& f) {
    const HermitianMatrix b(a.matrix() + phi.matrix());
    const FinitePVM e = pvm_from_hermitian(a);
    const FinitePVM fb = pvm_from_hermitian(b);
    // sum_{ij} phi_f(y_j, x_i) Q_j (-Phi) P_i = f(A) - f(B); negate back.
    const ComplexMatrix swapped = doi_apply(divided_difference_kernel(f), fb, e, -phi.matrix());
    return -swapped;
}

ExpDifferenceBound exp_difference_bound(const HermitianMatrix& a, const HermitianMatrix& phi, double t) {
    const HermitianMatrix b(a.matrix() + phi.matrix());
    ExpDifferenceBound out;
    out.lhs_norm = op_norm(matrix_exp_i(b, t) - matrix_exp_i(a, t));
    out.bound = std::abs(t) * op_norm(phi.matrix());
    out.ok = out.lhs_norm <= out.bound + 1e-10;
    return out;
}

ComplexMatrix dk_derivative(const OperatorPath& path, double s, const DifferentiableFunction& f) {
    path.require(s);
    const FinitePVM e = pvm_from_hermitian(path.hamiltonian(s));
    return doi_apply(divided_difference_kernel(f), e, e, path.phi_prime(s).matrix());
}

double default_fd_step(double s) { return 1e-4 * (1.0 + std::abs(s)); }

ComplexMatrix fd_derivative(const OperatorPath& path, double s, const DifferentiableFunction& f, double h) {
    if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
    path.require(s - h);
    path.require(s + h);
    const ComplexMatrix plus = matrix_function(hermitian_eig(path.hamiltonian(s + h)), f.value);
    const ComplexMatrix minus = matrix_function(hermitian_eig(path.hamiltonian(s - h)), f.value);
    ComplexMatrix d = plus - minus;
    d *= 1.0 / (2.0 * h);
    return d;
}

ComplexMatrix duhamel_derivative(const OperatorPath& path, double s, double t, std::size_t u_nodes) {
    path.require(s);
    const std::size_t n = path.dim();
    ComplexMatrix out(n, n);
    if (t == 0.0) return out;
    const auto eig = hermitian_eig(path.hamiltonian(s));
    const ComplexMatrix phi_prime = path.phi_prime(s).matrix();
    const Quadrature rule = gauss_legendre(u_nodes, 0.0, 1.0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double r = rule.nodes[k];
        const ComplexMatrix left = matrix_exp_i(eig, t * r);
        const ComplexMatrix right = matrix_exp_i(eig, t * (1.0 - r));
        out.add_scaled(kI * t * rule.weights[k], left * phi_prime * right);
    }
    return out;
}

double min_eigen_gap(const EigenDecomposition& eig) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < eig.dim(); ++k) gap = std::min(gap, eig.eigenvalues[k] - eig.eigenvalues[k - 1]);
    return gap;
}

}  // namespace doiflow
