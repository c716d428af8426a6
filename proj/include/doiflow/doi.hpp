#pragma once

// Double operator integrals over finite atomic PVMs:
//   int int phi(x, y) dE(x) T dF(y) = sum_{i,j} phi(x_i, y_j) P_i T Q_j,
// applied as a Schur multiplier in the joint atom bases.

#include "doiflow/kernels.hpp"
#include "doiflow/pvm.hpp"

namespace doiflow {

/// K_ij = phi(x_i, y_j) over the atom grid. DomainError names (i, j) for non-finite values.
ComplexMatrix schur_matrix(const Kernel& k, const FinitePVM& e, const FinitePVM& f);

/// V_E (K o (V_E^dagger T V_F)) V_F^dagger with K expanded blockwise over atom ranks.
ComplexMatrix doi_apply(const Kernel& k, const FinitePVM& e, const FinitePVM& f, const ComplexMatrix& t);
/// Same, with a precomputed atom-grid matrix.
ComplexMatrix doi_apply_schur(const ComplexMatrix& schur, const FinitePVM& e, const FinitePVM& f,
                              const ComplexMatrix& t);

/// sum_z nu_z (int alpha_z dE) T (int beta_z dF). Independent of the Schur path.
ComplexMatrix doi_apply_decomposed(const DecomposedKernel& k, const FinitePVM& e, const FinitePVM& f,
                                   const ComplexMatrix& t);

/// max_ij |phi(x_i, y_j)|: the exact norm of the DOI on Hilbert-Schmidt space.
double doi_s2_norm(const Kernel& k, const FinitePVM& e, const FinitePVM& f);

struct TracePairing {
    Complex value;       // Tr(S^dagger DOI(T))
    Complex decomposed;  // sum_z nu_z Tr(S^dagger A_z T B_z)
    double residual = 0.0;
    double tolerance = 0.0;

    [[nodiscard]] bool ok() const noexcept { return residual <= tolerance; }
};

TracePairing trace_pairing(const DecomposedKernel& k, const FinitePVM& e, const FinitePVM& f, const ComplexMatrix& s,
                           const ComplexMatrix& t);

struct AdjointCheck {
    double residual = 0.0;
    double tolerance = 0.0;

    [[nodiscard]] bool ok() const noexcept { return residual <= tolerance; }
};

/// DOI(k, E, F, T)^dagger against DOI(k~*, F, E, T^dagger) with k~*(y, x) = conj(k(x, y)).
AdjointCheck doi_adjoint_check(const Kernel& k, const FinitePVM& e, const FinitePVM& f, const ComplexMatrix& t);

}  // namespace doiflow
