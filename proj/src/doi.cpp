#include "doiflow/doi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace doiflow {

namespace {

void check_operator_shape(const FinitePVM& e, const FinitePVM& f, const ComplexMatrix& t, const char* what) {
    if (t.rows() != e.dim() || t.cols() != f.dim()) {
        std::ostringstream os;
        os << what << ": operator is " << t.rows() << "x" << t.cols() << ", expected " << e.dim() << "x" << f.dim();
        throw ShapeError(os.str());
    }
}

}  // namespace

ComplexMatrix schur_matrix(const Kernel& k, const FinitePVM& e, const FinitePVM& f) {
    ComplexMatrix m(e.size(), f.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = 0; j < f.size(); ++j) {
            const Complex v = k(e.location(i), f.location(j));
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                std::ostringstream os;
                os << "kernel '" << k.label() << "' is not finite at atom pair (" << i << ", " << j << ")";
                throw DomainError(os.str());
            }
            m(i, j) = v;
        }
    }
    return m;
}

ComplexMatrix doi_apply_schur(const ComplexMatrix& schur, const FinitePVM& e, const FinitePVM& f,
                              const ComplexMatrix& t) {
    check_operator_shape(e, f, t, "doi_apply");
    if (schur.rows() != e.size() || schur.cols() != f.size()) throw ShapeError("Schur matrix does not match atom grid");
    const ComplexMatrix& ve = e.basis();
    const ComplexMatrix& vf = f.basis();
    ComplexMatrix inner_t = ve.adjoint() * t * vf;
    const auto& row_atom = e.column_atom();
    const auto& col_atom = f.column_atom();
    for (std::size_t r = 0; r < inner_t.rows(); ++r)
        for (std::size_t c = 0; c < inner_t.cols(); ++c) inner_t(r, c) *= schur(row_atom[r], col_atom[c]);
    return ve * inner_t * vf.adjoint();
}

ComplexMatrix doi_apply(const Kernel& k, const FinitePVM& e, const FinitePVM& f, const ComplexMatrix& t) {
    check_operator_shape(e, f, t, "doi_apply");
    return doi_apply_schur(schur_matrix(k, e, f), e, f, t);
}

ComplexMatrix doi_apply_decomposed(const DecomposedKernel& k, const FinitePVM& e, const FinitePVM& f,
                                   const ComplexMatrix& t) {
    check_operator_shape(e, f, t, "doi_apply_decomposed");
    ComplexMatrix out(t.rows(), t.cols());
    for (std::size_t z = 0; z < k.size(); ++z) {
        const ComplexMatrix a = integrate_scalar(e, k.alpha[z]);
        const ComplexMatrix b = integrate_scalar(f, k.beta[z]);
        out.add_scaled(k.weights[z], a * t * b);
    }
    return out;
}

double doi_s2_norm(const Kernel& k, const FinitePVM& e, const FinitePVM& f) {
    if (e.size() == 0 || f.size() == 0) throw InvalidInput("doi_s2_norm needs nonempty atom lists");
    return schur_matrix(k, e, f).max_abs();
}

TracePairing trace_pairing(const DecomposedKernel& k, const FinitePVM& e, const FinitePVM& f, const ComplexMatrix& s,
                           const ComplexMatrix& t) {
    check_operator_shape(e, f, s, "trace_pairing");
    check_operator_shape(e, f, t, "trace_pairing");
    TracePairing out;
    ComplexMatrix schur(e.size(), f.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j) schur(i, j) = k(e.location(i), f.location(j));
    out.value = hs_inner(s, doi_apply_schur(schur, e, f, t));
    for (std::size_t z = 0; z < k.size(); ++z) {
        const ComplexMatrix a = integrate_scalar(e, k.alpha[z]);
        const ComplexMatrix b = integrate_scalar(f, k.beta[z]);
        out.decomposed += k.weights[z] * hs_inner(s, a * t * b);
    }
    out.residual = std::abs(out.value - out.decomposed);
    out.tolerance = 1e-9 * (1.0 + hs_norm(s) * hs_norm(t) * mnorm_upper_bound(k, e, f));
    return out;
}

AdjointCheck doi_adjoint_check(const Kernel& k, const FinitePVM& e, const FinitePVM& f, const ComplexMatrix& t) {
    const ComplexMatrix lhs = doi_apply(k, e, f, t).adjoint();
    const Kernel swapped([fn = k.function()](double y, double x) { return std::conj(fn(x, y)); },
                         "swapconj(" + k.label() + ")");
    const ComplexMatrix rhs = doi_apply(swapped, f, e, t.adjoint());
    AdjointCheck out;
    out.residual = max_abs_diff(lhs, rhs);
    out.tolerance = 1e-10 * (1.0 + hs_norm(t)) * schur_matrix(k, e, f).max_abs() + 1e-14;
    return out;
}

}  // namespace doiflow
