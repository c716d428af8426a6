#include "doiflow/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace doiflow {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_input: return "InvalidInput";
        case ErrorCode::convergence_failure: return "ConvergenceFailure";
        case ErrorCode::domain_error: return "DomainError";
        case ErrorCode::shape_error: return "ShapeError";
        case ErrorCode::index_error: return "IndexError";
        case ErrorCode::truncation_error: return "TruncationError";
        case ErrorCode::patch_error: return "PatchError";
        case ErrorCode::gap_error: return "GapError";
        case ErrorCode::contour_error: return "ContourError";
        case ErrorCode::quadrature_error: return "QuadratureError";
        case ErrorCode::config_error: return "ConfigError";
    }
    return "Unknown";
}

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << what << ": " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
        throw ShapeError(os.str());
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) {
        throw ShapeError("entry count " + std::to_string(entries_.size()) + " != " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    if (!all_finite()) throw InvalidInput("matrix has non-finite entries");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("ragged initializer");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v, std::span<const Complex> w) {
    ComplexMatrix m(v.size(), w.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
    return m;
}

ComplexVector ComplexMatrix::column(std::size_t j) const {
    ComplexVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix m = *this;
    for (auto& z : m.entries_) z = std::conj(z);
    return m;
}

Complex ComplexMatrix::trace() const {
    Complex s{};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : entries_) m = std::max(m, std::abs(z));
    return m;
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "matrix sum");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "matrix difference");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
    for (auto& z : entries_) z *= scale;
    return *this;
}

ComplexMatrix& ComplexMatrix::add_scaled(Complex scale, const ComplexMatrix& other) {
    require_same_shape(*this, other, "scaled sum");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += scale * other.entries_[k];
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
ComplexMatrix operator*(Complex scale, ComplexMatrix a) { return a *= scale; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matrix product: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    ComplexMatrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    // i-k-j order keeps the inner loop contiguous in both b and c; the loop
    // runs on the interleaved (re, im) doubles so it vectorizes.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = reinterpret_cast<double*>(&c(i, 0));
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            const double ar = aik.real();
            const double ai = aik.imag();
            const double* brow = reinterpret_cast<const double*>(&b(k, 0));
            for (std::size_t j = 0; j < 2 * n; j += 2) {
                const double br = brow[j];
                const double bi = brow[j + 1];
                crow[j] += ar * br - ai * bi;
                crow[j + 1] += ar * bi + ai * br;
            }
        }
    }
    return c;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> v) {
    if (a.cols() != v.size()) throw ShapeError("matrix-vector product dimension mismatch");
    ComplexVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

ComplexMatrix hadamard(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "entrywise product");
    ComplexMatrix c = a;
    auto ce = c.entries();
    auto be = b.entries();
    for (std::size_t k = 0; k < ce.size(); ++k) ce[k] *= be[k];
    return c;
}

Complex inner(std::span<const Complex> v, std::span<const Complex> w) {
    if (v.size() != w.size()) throw ShapeError("inner product dimension mismatch");
    Complex s{};
    for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * w[i];
    return s;
}

double vector_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

Complex hs_inner(const ComplexMatrix& s, const ComplexMatrix& t) {
    require_same_shape(s, t, "Hilbert-Schmidt pairing");
    Complex acc{};
    auto se = s.entries();
    auto te = t.entries();
    for (std::size_t k = 0; k < se.size(); ++k) acc += std::conj(se[k]) * te[k];
    return acc;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "difference");
    double m = 0.0;
    auto ae = a.entries();
    auto be = b.entries();
    for (std::size_t k = 0; k < ae.size(); ++k) m = std::max(m, std::abs(ae[k] - be[k]));
    return m;
}

ComplexMatrix inverse(const ComplexMatrix& m) {
    if (!m.square()) throw ShapeError("inverse of a non-square matrix");
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    const double scale = std::max(m.max_abs(), 1e-300);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) <= 1e-15 * scale) throw InvalidInput("matrix is numerically singular");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const Complex d = 1.0 / a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) *= d;
            inv(col, j) *= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex f = a(r, col);
            if (f == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m, double rel_tol) {
    if (!m.square() || m.rows() == 0) throw InvalidInput("Hermitian matrix must be square with dim >= 1");
    if (!m.all_finite()) throw InvalidInput("Hermitian matrix has non-finite entries");
    const std::size_t n = m.rows();
    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            defect = std::max(defect, std::abs(m(i, j) - std::conj(m(j, i))));
            const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
    if (defect > rel_tol * (1.0 + m.max_abs())) {
        std::ostringstream os;
        os << "matrix is not Hermitian (defect " << defect << ")";
        throw InvalidInput(os.str());
    }
    m_ = std::move(m);
    defect_ = defect;
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(a.matrix() + b.matrix());
}

HermitianMatrix operator*(double scale, const HermitianMatrix& a) {
    return HermitianMatrix(Complex(scale) * a.matrix());
}

ComplexMatrix EigenDecomposition::reconstruct() const {
    return matrix_function(*this, [](double x) { return Complex(x); });
}

namespace {

double conj_of(double x) { return x; }
Complex conj_of(const Complex& z) { return std::conj(z); }
double real_of(double x) { return x; }
double real_of(const Complex& z) { return z.real(); }
double norm_of(double x) { return x * x; }
double norm_of(const Complex& z) { return std::norm(z); }

// Rotates in place: a is the full Hermitian working matrix (row-major, n x n),
// vt holds the eigenvector estimates as rows. Only rows are touched in the
// inner loops; the mirrored columns are written from Hermitian symmetry.
// T = double handles real symmetric input at a quarter of the cost.
template <typename T>
EigenDecomposition jacobi_core(std::vector<T> a, std::vector<T> vt, std::size_t n, double frob,
                               const JacobiOptions& options) {
    const double target = options.rel_tol * frob;
    auto at = [&](std::size_t i, std::size_t j) -> T& { return a[i * n + j]; };

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += norm_of(a[i * n + j]);
        return std::sqrt(2.0 * s);
    };

    int sweep = 0;
    double off = off_norm();
    while (off > target && off > 0.0) {
        if (sweep >= options.max_sweeps) {
            std::ostringstream os;
            os << "Jacobi did not converge in " << options.max_sweeps << " sweeps (off-diagonal residual " << off
               << ")";
            throw ConvergenceFailure(os.str());
        }
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const T apq = at(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const double app = real_of(at(p, p));
                const double aqq = real_of(at(q, q));
                // Skip rotations that cannot change the diagonal in floating point.
                if (sweep > 4 && 1e-18 * std::abs(app) >= mag && 1e-18 * std::abs(aqq) >= mag) {
                    at(p, q) = at(q, p) = T{0.0};
                    continue;
                }
                const T phase = apq / mag;
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const T sp = s * conj_of(phase);  // s e*
                const T cp = c * conj_of(phase);  // c e*
                const T spc = conj_of(sp);
                const T cpc = conj_of(cp);

                // Rows p, q of J^dagger A J off the 2x2 block; columns mirror them.
                T* rp = &at(p, 0);
                T* rq = &at(q, 0);
                for (std::size_t k = 0; k < n; ++k) {
                    const T apk = rp[k];
                    const T aqk = rq[k];
                    rp[k] = c * apk - spc * aqk;
                    rq[k] = s * apk + cpc * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    at(k, p) = conj_of(rp[k]);
                    at(k, q) = conj_of(rq[k]);
                }
                at(p, p) = app - t * mag;
                at(q, q) = aqq + t * mag;
                at(p, q) = at(q, p) = T{0.0};

                T* vp = &vt[p * n];
                T* vq = &vt[q * n];
                for (std::size_t k = 0; k < n; ++k) {
                    const T vkp = vp[k];
                    const T vkq = vq[k];
                    vp[k] = c * vkp - sp * vkq;
                    vq[k] = s * vkp + cp * vkq;
                }
            }
        }
        off = off_norm();
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return real_of(at(i, i)) < real_of(at(j, j)); });

    EigenDecomposition eig;
    eig.sweeps = sweep;
    eig.eigenvalues.resize(n);
    eig.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        eig.eigenvalues[c] = real_of(at(order[c], order[c]));
        const T* row = &vt[order[c] * n];
        for (std::size_t r = 0; r < n; ++r) eig.eigenvectors(r, c) = row[r];
    }
    return eig;
}

bool is_real(const ComplexMatrix& m) {
    return std::all_of(m.entries().begin(), m.entries().end(), [](const Complex& z) { return z.imag() == 0.0; });
}

// Dispatches on whether a and the transposed eigenvector seed vt are real.
EigenDecomposition run_jacobi(const ComplexMatrix& a, const ComplexMatrix& vt, double frob,
                              const JacobiOptions& options) {
    const std::size_t n = a.rows();
    if (is_real(a) && is_real(vt)) {
        std::vector<double> ra(n * n), rv(n * n);
        for (std::size_t k = 0; k < n * n; ++k) {
            ra[k] = a.entries()[k].real();
            rv[k] = vt.entries()[k].real();
        }
        return jacobi_core(std::move(ra), std::move(rv), n, frob, options);
    }
    return jacobi_core(std::vector<Complex>(a.entries().begin(), a.entries().end()),
                       std::vector<Complex>(vt.entries().begin(), vt.entries().end()), n, frob, options);
}

}  // namespace

ComplexMatrix orthonormalize_columns(const ComplexMatrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    if (cols > rows) throw ShapeError("orthonormalize_columns: more columns than rows");
    // Modified Gram-Schmidt on the rows of the transpose.
    std::vector<Complex> t(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = m(r, c);
    for (std::size_t j = 0; j < cols; ++j) {
        Complex* vj = &t[j * rows];
        for (std::size_t k = 0; k < j; ++k) {
            const Complex* vk = &t[k * rows];
            Complex proj{};
            for (std::size_t i = 0; i < rows; ++i) proj += std::conj(vk[i]) * vj[i];
            for (std::size_t i = 0; i < rows; ++i) vj[i] -= proj * vk[i];
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < rows; ++i) norm += std::norm(vj[i]);
        norm = std::sqrt(norm);
        if (!(norm > 1e-12)) throw InvalidInput("orthonormalize_columns: columns are linearly dependent");
        for (std::size_t i = 0; i < rows; ++i) vj[i] /= norm;
    }
    ComplexMatrix out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = t[c * rows + r];
    return out;
}

EigenDecomposition hermitian_eig(const HermitianMatrix& h, const JacobiOptions& options) {
    const std::size_t n = h.dim();
    if (n == 0) throw InvalidInput("hermitian_eig: dim must be >= 1");
    return run_jacobi(h.matrix(), ComplexMatrix::identity(n), hs_norm(h.matrix()), options);
}

EigenDecomposition hermitian_eig(const HermitianMatrix& h, const ComplexMatrix& initial_basis,
                                 const JacobiOptions& options) {
    const std::size_t n = h.dim();
    if (n == 0) throw InvalidInput("hermitian_eig: dim must be >= 1");
    if (initial_basis.rows() != n || initial_basis.cols() != n) throw ShapeError("initial basis must be dim x dim");
    // Re-orthonormalize so rounding drift does not accumulate over warm starts.
    const ComplexMatrix basis = orthonormalize_columns(initial_basis);
    ComplexMatrix a = basis.adjoint() * h.matrix() * basis;
    // Restore exact Hermitian symmetry lost in the products.
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex m = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = m;
            a(j, i) = std::conj(m);
        }
    }
    ComplexMatrix vt(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) vt(c, r) = basis(r, c);
    return run_jacobi(a, vt, hs_norm(h.matrix()), options);
}

ComplexMatrix matrix_function(const EigenDecomposition& eig, const ScalarFunction& f) {
    const std::size_t n = eig.dim();
    ComplexVector values(n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = f(eig.eigenvalues[i]);
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
            std::ostringstream os;
            os << "function is not finite at eigenvalue " << eig.eigenvalues[i];
            throw DomainError(os.str());
        }
    }
    const ComplexMatrix& u = eig.eigenvectors;
    ComplexMatrix scaled = u;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) scaled(r, c) *= values[c];
    return scaled * u.adjoint();
}

ComplexMatrix matrix_exp_i(const EigenDecomposition& eig, double t) {
    if (t == 0.0) return ComplexMatrix::identity(eig.dim());
    return matrix_function(eig, [t](double x) { return std::exp(kI * (t * x)); });
}

ComplexMatrix matrix_exp_i(const HermitianMatrix& h, double t) {
    if (t == 0.0) return ComplexMatrix::identity(h.dim());
    return matrix_exp_i(hermitian_eig(h), t);
}

std::vector<double> singular_values(const ComplexMatrix& m) {
    if (m.empty()) return {};
    // Use the smaller Gram matrix.
    const ComplexMatrix gram = m.rows() < m.cols() ? m * m.adjoint() : m.adjoint() * m;
    const auto eig = hermitian_eig(HermitianMatrix(gram, 1e-8));
    std::vector<double> sv;
    sv.reserve(eig.dim());
    for (auto it = eig.eigenvalues.rbegin(); it != eig.eigenvalues.rend(); ++it)
        sv.push_back(std::sqrt(std::max(*it, 0.0)));
    return sv;
}

MatrixNorms norms(const ComplexMatrix& m) {
    MatrixNorms out;
    out.hs_norm = hs_norm(m);
    const auto sv = singular_values(m);
    if (!sv.empty()) out.op_norm = sv.front();
    for (double s : sv) out.trace_norm += s;
    return out;
}

double op_norm(const ComplexMatrix& m) {
    const auto sv = singular_values(m);
    return sv.empty() ? 0.0 : sv.front();
}

double hs_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (const auto& z : m.entries()) s += std::norm(z);
    return std::sqrt(s);
}

double trace_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (double x : singular_values(m)) s += x;
    return s;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.square() || !b.square() || a.rows() != b.rows()) throw ShapeError("commutator needs equal square shapes");
    return a * b - b * a;
}

namespace {

ComplexVector basis_vector(std::size_t dim, std::size_t k) {
    ComplexVector e(dim);
    e[k] = 1.0;
    return e;
}

Complex checked(const QuadraticForm& rho, std::span<const Complex> u) {
    const Complex value = rho(u);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw InvalidInput("quadratic form returned a non-finite value");
    return value;
}

}  // namespace

RecoveredOperator recover_operator_from_quadratic_form(const QuadraticForm& rho, std::size_t dim) {
    if (dim == 0) throw InvalidInput("dim must be >= 1");
    RecoveredOperator out;
    out.matrix = ComplexMatrix(dim, dim);
    ComplexVector u(dim);
    auto rho_at = [&](std::size_t j, std::size_t k, Complex coeff) {
        std::fill(u.begin(), u.end(), Complex{});
        u[j] += 1.0;
        u[k] += coeff;
        return checked(rho, u);
    };
    bool real_valued = true;
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t k = 0; k < dim; ++k) {
            const Complex r1 = rho_at(j, k, 1.0);
            const Complex r2 = rho_at(j, k, -1.0);
            const Complex r3 = rho_at(j, k, kI);
            const Complex r4 = rho_at(j, k, -kI);
            for (const Complex& r : {r1, r2, r3, r4})
                if (std::abs(r.imag()) > 1e-14 * (1.0 + std::abs(r))) real_valued = false;
            out.matrix(j, k) = 0.25 * (r1 - r2 - kI * r3 + kI * r4);
        }
    }
    if (real_valued) {
        out.matrix = HermitianMatrix(out.matrix, 1e300).matrix();
        out.symmetrized = true;
    }

    // Probe battery: basis vectors plus a fixed family of dense vectors.
    double residual = 0.0;
    auto probe = [&](std::span<const Complex> w) {
        const Complex expected = checked(rho, w);
        const Complex got = inner(w, out.matrix * w);
        residual = std::max(residual, std::abs(got - expected));
    };
    for (std::size_t k = 0; k < dim; ++k) probe(basis_vector(dim, k));
    for (int family = 1; family <= 8; ++family) {
        ComplexVector w(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            const double phase = 0.7 * family * static_cast<double>(k + 1) + 0.3 * family;
            w[k] = Complex(std::cos(phase), std::sin(1.3 * phase)) / std::sqrt(static_cast<double>(dim));
        }
        probe(w);
    }
    out.residual = residual;
    return out;
}

}  // namespace doiflow
