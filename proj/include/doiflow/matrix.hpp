#pragma once

// Dense complex matrices, Hermitian eigendecomposition and matrix functions.
//
// Everything here is a value type. Storage is row-major; dimensions are
// checked on every binary operation and reported through ShapeError.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "doiflow/errors.hpp"

namespace doiflow {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Scalar function of a real variable, complex valued (f, alpha, beta, ...).
using ScalarFunction = std::function<Complex(double)>;

inline constexpr Complex kI{0.0, 1.0};

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> diag);
    static ComplexMatrix diagonal(std::span<const double> diag);
    /// |v><w|
    static ComplexMatrix outer(std::span<const Complex> v, std::span<const Complex> w);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    [[nodiscard]] std::span<const Complex> entries() const noexcept { return entries_; }
    [[nodiscard]] std::span<Complex> entries() noexcept { return entries_; }
    [[nodiscard]] std::span<const Complex> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }
    [[nodiscard]] ComplexVector column(std::size_t j) const;

    [[nodiscard]] ComplexMatrix adjoint() const;
    [[nodiscard]] ComplexMatrix conj() const;
    [[nodiscard]] Complex trace() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool all_finite() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale);
    /// this += scale * other, without a temporary.
    ComplexMatrix& add_scaled(Complex scale, const ComplexMatrix& other);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scale, ComplexMatrix a);
ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> v);

/// Entrywise (Schur/Hadamard) product.
ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b);

/// <v, w>, conjugate-linear in the first slot.
Complex inner(std::span<const Complex> v, std::span<const Complex> w);
double vector_norm(std::span<const Complex> v);

/// Tr(S^dagger T), the Hilbert-Schmidt inner product.
Complex hs_inner(const ComplexMatrix& s, const ComplexMatrix& t);

/// Largest entrywise modulus of a - b.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Inverse by Gaussian elimination with partial pivoting. InvalidInput if singular.
ComplexMatrix inverse(const ComplexMatrix& m);

/// Square matrix equal to its adjoint (up to the recorded defect).
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    /// Symmetrizes as (M + M^dagger)/2. Throws InvalidInput when the
    /// pre-symmetrization defect exceeds rel_tol * (1 + max|M|), or when M
    /// is not square or has non-finite entries.
    explicit HermitianMatrix(ComplexMatrix m, double rel_tol = 1e-12);
    HermitianMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
        : HermitianMatrix(ComplexMatrix(rows)) {}

    [[nodiscard]] std::size_t dim() const noexcept { return m_.rows(); }
    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return m_; }
    [[nodiscard]] double defect() const noexcept { return defect_; }

    const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    ComplexMatrix m_;
    double defect_ = 0.0;
};

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix operator*(double scale, const HermitianMatrix& a);

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // unitary, columns are eigenvectors
    int sweeps = 0;

    [[nodiscard]] std::size_t dim() const noexcept { return eigenvalues.size(); }
    [[nodiscard]] ComplexMatrix reconstruct() const;
};

struct JacobiOptions {
    double rel_tol = 1e-13;
    int max_sweeps = 100;
};

/// Cyclic complex Jacobi. Converged when the off-diagonal Frobenius norm is
/// at most rel_tol * ||H||_F. Ties in the sorted spectrum keep sweep order.
EigenDecomposition hermitian_eig(const HermitianMatrix& h, const JacobiOptions& options = {});
/// Modified Gram-Schmidt; InvalidInput when the columns are dependent.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& m);

/// Same, started from basis^dagger H basis for a unitary basis close to the
/// eigenvectors (fewer sweeps along a smooth path).
EigenDecomposition hermitian_eig(const HermitianMatrix& h, const ComplexMatrix& initial_basis,
                                 const JacobiOptions& options = {});

/// U diag(f(lambda)) U^dagger. DomainError names the eigenvalue where f is not finite.
ComplexMatrix matrix_function(const EigenDecomposition& eig, const ScalarFunction& f);

/// e^{itH}.
ComplexMatrix matrix_exp_i(const HermitianMatrix& h, double t);
ComplexMatrix matrix_exp_i(const EigenDecomposition& eig, double t);

struct MatrixNorms {
    double op_norm = 0.0;
    double hs_norm = 0.0;
    double trace_norm = 0.0;
};

/// Singular values from the eigendecomposition of M^dagger M, descending.
std::vector<double> singular_values(const ComplexMatrix& m);
MatrixNorms norms(const ComplexMatrix& m);
double op_norm(const ComplexMatrix& m);
double hs_norm(const ComplexMatrix& m);
double trace_norm(const ComplexMatrix& m);

/// AB - BA.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

using QuadraticForm = std::function<Complex(std::span<const Complex>)>;

struct RecoveredOperator {
    ComplexMatrix matrix;
    /// max |<u, A u> - rho(u)| over the probe battery.
    double residual = 0.0;
    bool symmetrized = false;
};

/// Polarization: A_jk = 1/4 [rho(e_j+e_k) - rho(e_j-e_k) - i rho(e_j+i e_k) + i rho(e_j-i e_k)].
RecoveredOperator recover_operator_from_quadratic_form(const QuadraticForm& rho, std::size_t dim);

}  // namespace doiflow
