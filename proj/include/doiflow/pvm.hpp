#pragma once

// Finite atomic projection-valued measures and the product measure acting
// on n x m matrices by T -> P_i T Q_j.
//
// A FinitePVM is stored through an orthonormal basis whose columns are
// grouped by atom, so projectors are V_i V_i^dagger and never materialized
// unless asked for.

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "doiflow/matrix.hpp"

namespace doiflow {

struct Atom {
    double location = 0.0;
    ComplexMatrix projector;
};

class FinitePVM {
public:
    /// Validates idempotence, self-adjointness, pairwise orthogonality and
    /// completeness (all within `tol`) and strictly increasing locations.
    explicit FinitePVM(std::vector<Atom> atoms, double tol = 1e-10);

    /// Atoms given by contiguous column groups of a unitary basis.
    /// `offsets` has size() + 1 entries, offsets.front() == 0, offsets.back() == dim.
    FinitePVM(std::vector<double> locations, ComplexMatrix basis, std::vector<std::size_t> offsets,
              double tol = 1e-10);

    [[nodiscard]] std::size_t dim() const noexcept { return basis_.rows(); }
    [[nodiscard]] std::size_t size() const noexcept { return locations_.size(); }
    [[nodiscard]] const std::vector<double>& locations() const noexcept { return locations_; }
    [[nodiscard]] double location(std::size_t i) const { return locations_.at(i); }
    [[nodiscard]] std::size_t rank(std::size_t i) const { return offsets_.at(i + 1) - offsets_.at(i); }
    [[nodiscard]] ComplexMatrix projector(std::size_t i) const;
    /// Sum of the projectors of the listed atoms.
    [[nodiscard]] ComplexMatrix projector(std::span<const std::size_t> atoms) const;

    [[nodiscard]] const ComplexMatrix& basis() const noexcept { return basis_; }
    [[nodiscard]] const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
    /// Atom index of every basis column.
    [[nodiscard]] const std::vector<std::size_t>& column_atom() const noexcept { return column_atom_; }

private:
    void finish(double tol);

    std::vector<double> locations_;
    ComplexMatrix basis_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> column_atom_;
};

/// 1e-9 * max(1, spectral diameter).
double default_cluster_tol(const EigenDecomposition& eig);

/// Merges eigenvalues chained within cluster_tol into one atom located at the
/// rank-weighted mean.
FinitePVM pvm_from_eigen(const EigenDecomposition& eig, std::optional<double> cluster_tol = std::nullopt);
FinitePVM pvm_from_hermitian(const HermitianMatrix& h, std::optional<double> cluster_tol = std::nullopt);

/// sum_i alpha(x_i) P_i
ComplexMatrix integrate_scalar(const FinitePVM& pvm, const ScalarFunction& alpha);

struct AtomicMeasure {
    std::vector<double> locations;
    std::vector<Complex> weights;

    [[nodiscard]] Complex total() const;
};

/// Atoms (x_i, <v, P_i w>).
AtomicMeasure scalar_measure(const FinitePVM& pvm, std::span<const Complex> v, std::span<const Complex> w);

struct ProductPVM {
    FinitePVM left;   // E on H, dim n
    FinitePVM right;  // F on K, dim m
};

using AtomPair = std::pair<std::size_t, std::size_t>;
using Region = std::set<AtomPair>;

Region full_region(const ProductPVM& g);

/// sum over (i, j) in region of P_i T Q_j.
ComplexMatrix product_apply(const ProductPVM& g, const Region& region, const ComplexMatrix& t);

/// Complex measure on the atom grid.
struct GridMeasure {
    std::vector<double> x;
    std::vector<double> y;
    ComplexMatrix weights;  // x.size() x y.size()

    [[nodiscard]] Complex total() const;
};

/// Weight at (i, j) is Tr(S^dagger P_i T Q_j).
GridMeasure product_scalar_measure(const ProductPVM& g, const ComplexMatrix& s, const ComplexMatrix& t);

}  // namespace doiflow
