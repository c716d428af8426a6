#include "doiflow/pvm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace doiflow {

namespace {

ComplexMatrix gram_defect(const ComplexMatrix& basis) {
    return basis.adjoint() * basis - ComplexMatrix::identity(basis.cols());
}

/// Columns [lo, hi) of the basis.
ComplexMatrix column_block(const ComplexMatrix& basis, std::size_t lo, std::size_t hi) {
    ComplexMatrix block(basis.rows(), hi - lo);
    for (std::size_t r = 0; r < basis.rows(); ++r)
        for (std::size_t c = lo; c < hi; ++c) block(r, c - lo) = basis(r, c);
    return block;
}

void check_shape(const ProductPVM& g, const ComplexMatrix& t, const char* what) {
    if (t.rows() != g.left.dim() || t.cols() != g.right.dim()) {
        std::ostringstream os;
        os << what << ": operator is " << t.rows() << "x" << t.cols() << ", expected " << g.left.dim() << "x"
           << g.right.dim();
        throw ShapeError(os.str());
    }
}

}  // namespace

FinitePVM::FinitePVM(std::vector<Atom> atoms, double tol) {
    if (atoms.empty()) throw InvalidInput("a PVM needs at least one atom");
    const std::size_t n = atoms.front().projector.rows();
    ComplexMatrix sum(n, n);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const ComplexMatrix& p = atoms[i].projector;
        if (!p.square() || p.rows() != n) throw ShapeError("projector dimensions differ");
        if (i > 0 && !(atoms[i].location > atoms[i - 1].location))
            throw InvalidInput("atom locations must be strictly increasing");
        if (max_abs_diff(p, p.adjoint()) > tol) throw InvalidInput("projector " + std::to_string(i) + " is not self-adjoint");
        if (max_abs_diff(p * p, p) > tol) throw InvalidInput("projector " + std::to_string(i) + " is not idempotent");
        for (std::size_t j = 0; j < i; ++j) {
            if ((p * atoms[j].projector).max_abs() > tol)
                throw InvalidInput("projectors " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
        }
        sum += p;
    }
    if (max_abs_diff(sum, ComplexMatrix::identity(n)) > tol) throw InvalidInput("projectors do not sum to the identity");

    basis_ = ComplexMatrix(n, n);
    offsets_.push_back(0);
    std::size_t col = 0;
    for (const auto& atom : atoms) {
        const auto eig = hermitian_eig(HermitianMatrix(atom.projector, 1e-8));
        for (std::size_t k = 0; k < eig.dim(); ++k) {
            if (eig.eigenvalues[k] < 0.5) continue;
            if (col == n) throw InvalidInput("projector ranks exceed the dimension");
            for (std::size_t r = 0; r < n; ++r) basis_(r, col) = eig.eigenvectors(r, k);
            ++col;
        }
        locations_.push_back(atom.location);
        offsets_.push_back(col);
    }
    if (col != n) throw InvalidInput("projector ranks do not add up to the dimension");
    finish(tol);
}

FinitePVM::FinitePVM(std::vector<double> locations, ComplexMatrix basis, std::vector<std::size_t> offsets, double tol)
    : locations_(std::move(locations)), basis_(std::move(basis)), offsets_(std::move(offsets)) {
    if (locations_.empty()) throw InvalidInput("a PVM needs at least one atom");
    if (!basis_.square()) throw ShapeError("PVM basis must be square");
    if (offsets_.size() != locations_.size() + 1 || offsets_.front() != 0 || offsets_.back() != basis_.cols())
        throw InvalidInput("atom offsets do not partition the basis");
    for (std::size_t i = 0; i < locations_.size(); ++i) {
        if (offsets_[i + 1] <= offsets_[i]) throw InvalidInput("atom with empty range");
        if (i > 0 && !(locations_[i] > locations_[i - 1]))
            throw InvalidInput("atom locations must be strictly increasing");
    }
    if (gram_defect(basis_).max_abs() > tol) throw InvalidInput("PVM basis is not unitary");
    finish(tol);
}

void FinitePVM::finish(double /*tol*/) {
    column_atom_.assign(basis_.cols(), 0);
    for (std::size_t i = 0; i < locations_.size(); ++i)
        for (std::size_t c = offsets_[i]; c < offsets_[i + 1]; ++c) column_atom_[c] = i;
}

ComplexMatrix FinitePVM::projector(std::size_t i) const {
    if (i >= size()) throw IndexError("atom index " + std::to_string(i) + " out of range");
    const ComplexMatrix block = column_block(basis_, offsets_[i], offsets_[i + 1]);
    return block * block.adjoint();
}

ComplexMatrix FinitePVM::projector(std::span<const std::size_t> atoms) const {
    ComplexMatrix p(dim(), dim());
    for (std::size_t i : atoms) p += projector(i);
    return p;
}

double default_cluster_tol(const EigenDecomposition& eig) {
    const double diameter = eig.eigenvalues.back() - eig.eigenvalues.front();
    return 1e-9 * std::max(1.0, diameter);
}

FinitePVM pvm_from_eigen(const EigenDecomposition& eig, std::optional<double> cluster_tol) {
    const double tol = cluster_tol.value_or(default_cluster_tol(eig));
    if (tol < 0.0) throw InvalidInput("cluster tolerance must be nonnegative");
    std::vector<double> locations;
    std::vector<std::size_t> offsets{0};
    const auto& lambda = eig.eigenvalues;
    std::size_t start = 0;
    for (std::size_t k = 1; k <= lambda.size(); ++k) {
        if (k == lambda.size() || lambda[k] - lambda[k - 1] > tol) {
            double mean = 0.0;
            for (std::size_t j = start; j < k; ++j) mean += lambda[j];
            locations.push_back(mean / static_cast<double>(k - start));
            offsets.push_back(k);
            start = k;
        }
    }
    return FinitePVM(std::move(locations), eig.eigenvectors, std::move(offsets));
}

FinitePVM pvm_from_hermitian(const HermitianMatrix& h, std::optional<double> cluster_tol) {
    return pvm_from_eigen(hermitian_eig(h), cluster_tol);
}

ComplexMatrix integrate_scalar(const FinitePVM& pvm, const ScalarFunction& alpha) {
    const std::size_t n = pvm.dim();
    ComplexVector values(pvm.size());
    for (std::size_t i = 0; i < pvm.size(); ++i) {
        values[i] = alpha(pvm.location(i));
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
            std::ostringstream os;
            os << "integrand is not finite at atom " << pvm.location(i);
            throw DomainError(os.str());
        }
    }
    const ComplexMatrix& v = pvm.basis();
    ComplexMatrix scaled = v;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) scaled(r, c) *= values[pvm.column_atom()[c]];
    return scaled * v.adjoint();
}

Complex AtomicMeasure::total() const {
    Complex s{};
    for (const auto& w : weights) s += w;
    return s;
}

AtomicMeasure scalar_measure(const FinitePVM& pvm, std::span<const Complex> v, std::span<const Complex> w) {
    if (v.size() != pvm.dim() || w.size() != pvm.dim()) throw ShapeError("vector dimension does not match the PVM");
    const ComplexMatrix& basis = pvm.basis();
    // Coordinates in the atom basis: c = V^dagger v.
    const ComplexMatrix basis_adj = basis.adjoint();
    const ComplexVector cv = basis_adj * v;
    const ComplexVector cw = basis_adj * w;
    AtomicMeasure out;
    out.locations = pvm.locations();
    out.weights.assign(pvm.size(), Complex{});
    for (std::size_t c = 0; c < cv.size(); ++c) out.weights[pvm.column_atom()[c]] += std::conj(cv[c]) * cw[c];
    return out;
}

Region full_region(const ProductPVM& g) {
    Region r;
    for (std::size_t i = 0; i < g.left.size(); ++i)
        for (std::size_t j = 0; j < g.right.size(); ++j) r.emplace(i, j);
    return r;
}

ComplexMatrix product_apply(const ProductPVM& g, const Region& region, const ComplexMatrix& t) {
    check_shape(g, t, "product_apply");
    for (const auto& [i, j] : region) {
        if (i >= g.left.size() || j >= g.right.size()) {
            throw IndexError("region pair (" + std::to_string(i) + "," + std::to_string(j) + ") outside the " +
                             std::to_string(g.left.size()) + "x" + std::to_string(g.right.size()) + " grid");
        }
    }
    const ComplexMatrix& ve = g.left.basis();
    const ComplexMatrix& vf = g.right.basis();
    ComplexMatrix inner_t = ve.adjoint() * t * vf;
    const auto& row_atom = g.left.column_atom();
    const auto& col_atom = g.right.column_atom();
    for (std::size_t r = 0; r < inner_t.rows(); ++r)
        for (std::size_t c = 0; c < inner_t.cols(); ++c)
            if (!region.contains({row_atom[r], col_atom[c]})) inner_t(r, c) = 0.0;
    return ve * inner_t * vf.adjoint();
}

Complex GridMeasure::total() const {
    Complex s{};
    for (const auto& z : weights.entries()) s += z;
    return s;
}

GridMeasure product_scalar_measure(const ProductPVM& g, const ComplexMatrix& s, const ComplexMatrix& t) {
    check_shape(g, s, "product_scalar_measure");
    check_shape(g, t, "product_scalar_measure");
    const ComplexMatrix& ve = g.left.basis();
    const ComplexMatrix& vf = g.right.basis();
    // Tr(S^dagger P_i T Q_j) = sum over basis pairs in block (i, j) of conj(S~_rc) T~_rc.
    const ComplexMatrix st = ve.adjoint() * s * vf;
    const ComplexMatrix tt = ve.adjoint() * t * vf;
    GridMeasure out;
    out.x = g.left.locations();
    out.y = g.right.locations();
    out.weights = ComplexMatrix(g.left.size(), g.right.size());
    for (std::size_t r = 0; r < st.rows(); ++r)
        for (std::size_t c = 0; c < st.cols(); ++c)
            out.weights(g.left.column_atom()[r], g.right.column_atom()[c]) += std::conj(st(r, c)) * tt(r, c);
    return out;
}

}  // namespace doiflow
