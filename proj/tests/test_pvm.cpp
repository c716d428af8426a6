#include <gtest/gtest.h>

#include <cmath>

#include "doiflow/pvm.hpp"
#include "doiflow/rng.hpp"

using namespace doiflow;

namespace {

const HermitianMatrix kPauliX{{0.0, 1.0}, {1.0, 0.0}};

FinitePVM diagonal_pvm(std::vector<double> d) {
    return pvm_from_hermitian(HermitianMatrix(ComplexMatrix::diagonal(std::span<const double>(d))), 1e-9);
}

}  // namespace

TEST(PvmFromHermitian, DiagonalAtoms) {
    const FinitePVM p = diagonal_pvm({0.0, 1.0});
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.location(0), 0.0);
    EXPECT_EQ(p.location(1), 1.0);
    EXPECT_LT(max_abs_diff(p.projector(0), ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}), 1e-15);
    EXPECT_LT(max_abs_diff(p.projector(1), ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}}), 1e-15);
}

TEST(PvmFromHermitian, ClusterMerge) {
    const FinitePVM p = diagonal_pvm({0.0, 1e-12, 5.0});
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.rank(0), 2u);
    EXPECT_EQ(p.rank(1), 1u);
}

TEST(PvmFromHermitian, PauliX) {
    const FinitePVM p = pvm_from_hermitian(kPauliX, 1e-9);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_NEAR(p.location(0), -1.0, 1e-15);
    EXPECT_NEAR(p.location(1), 1.0, 1e-15);
    const ComplexMatrix half_minus{{0.5, -0.5}, {-0.5, 0.5}};
    const ComplexMatrix half_plus{{0.5, 0.5}, {0.5, 0.5}};
    EXPECT_LT(max_abs_diff(p.projector(0), half_minus), 1e-15);
    EXPECT_LT(max_abs_diff(p.projector(1), half_plus), 1e-15);
}

TEST(FinitePvm, RejectsBrokenAxioms) {
    const Atom a{0.0, ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}};
    const Atom b{1.0, ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}};
    EXPECT_THROW(FinitePVM({a, b}), InvalidInput);  // not orthogonal, not complete
    const Atom c{0.0, ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}}};
    EXPECT_THROW(FinitePVM({a, c}), InvalidInput);  // locations not increasing
    EXPECT_NO_THROW(FinitePVM({a, Atom{1.0, c.projector}}));
}

TEST(IntegrateScalar, Examples) {
    const FinitePVM p = pvm_from_hermitian(kPauliX, 1e-9);
    EXPECT_LT(max_abs_diff(integrate_scalar(p, [](double) { return Complex(1.0); }), ComplexMatrix::identity(2)),
              1e-15);
    const ComplexMatrix p0 = integrate_scalar(p, [&p](double x) { return Complex(x == p.location(0) ? 1.0 : 0.0); });
    EXPECT_LT(max_abs_diff(p0, p.projector(0)), 1e-15);
    EXPECT_LT(max_abs_diff(integrate_scalar(p, [](double x) { return Complex(x); }), kPauliX.matrix()), 1e-15);
}

TEST(ScalarMeasure, Examples) {
    const FinitePVM p = pvm_from_hermitian(kPauliX, 1e-9);
    const ComplexVector e1{1.0, 0.0};
    const AtomicMeasure m = scalar_measure(p, e1, e1);
    EXPECT_NEAR(std::abs(m.weights[0] - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.weights[1] - 0.5), 0.0, 1e-15);

    const ComplexVector v = p.basis().column(1);
    const AtomicMeasure unit = scalar_measure(p, v, v);
    EXPECT_NEAR(std::abs(unit.weights[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(unit.weights[1] - 1.0), 0.0, 1e-15);

    const ComplexVector zero{0.0, 0.0};
    for (Complex w : scalar_measure(p, zero, e1).weights) EXPECT_EQ(w, Complex(0.0));
}

TEST(ProductApply, Examples) {
    CounterRng rng(21);
    const ProductPVM g{pvm_from_hermitian(random_hermitian(rng, 4)), pvm_from_hermitian(random_hermitian(rng, 3))};
    const ComplexMatrix t = random_complex_matrix(rng, 4, 3);
    EXPECT_LT(max_abs_diff(product_apply(g, full_region(g), t), t), 1e-14);
    EXPECT_EQ(product_apply(g, {}, t).max_abs(), 0.0);
    const ComplexMatrix single = product_apply(g, {{1, 2}}, t);
    EXPECT_LT(max_abs_diff(single, g.left.projector(1) * t * g.right.projector(2)), 1e-14);
    EXPECT_THROW(product_apply(g, {{9, 0}}, t), IndexError);
    EXPECT_THROW(product_apply(g, full_region(g), random_complex_matrix(rng, 3, 3)), ShapeError);
}

TEST(ProductScalarMeasure, Examples) {
    CounterRng rng(22);
    const ProductPVM g{pvm_from_hermitian(random_hermitian(rng, 3)), pvm_from_hermitian(random_hermitian(rng, 4))};
    ComplexMatrix t = random_complex_matrix(rng, 3, 4);
    t *= 1.0 / hs_norm(t);
    const GridMeasure m = product_scalar_measure(g, t, t);
    for (Complex w : m.weights.entries()) {
        EXPECT_GE(w.real(), -1e-15);
        EXPECT_NEAR(w.imag(), 0.0, 1e-15);
    }
    EXPECT_NEAR(std::abs(m.total() - 1.0), 0.0, 1e-14);

    // Rank-one S = |a><b|, T = |c><d|: weight (i, j) = <a, P_i c> <d, Q_j b>.
    const ComplexVector a = random_complex_vector(rng, 3), c = random_complex_vector(rng, 3);
    const ComplexVector b = random_complex_vector(rng, 4), d = random_complex_vector(rng, 4);
    const GridMeasure r = product_scalar_measure(g, ComplexMatrix::outer(a, b), ComplexMatrix::outer(c, d));
    const AtomicMeasure left = scalar_measure(g.left, a, c);
    const AtomicMeasure right = scalar_measure(g.right, d, b);
    for (std::size_t i = 0; i < g.left.size(); ++i)
        for (std::size_t j = 0; j < g.right.size(); ++j)
            EXPECT_NEAR(std::abs(r.weights(i, j) - left.weights[i] * right.weights[j]), 0.0, 1e-13);

    const ProductPVM trivial{diagonal_pvm({0.0}), diagonal_pvm({0.0})};
    const GridMeasure orth = product_scalar_measure(trivial, ComplexMatrix{{1.0}}, ComplexMatrix{{0.0}});
    EXPECT_EQ(orth.weights(0, 0), Complex(0.0));
}
