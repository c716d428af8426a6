#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "doiflow/models.hpp"
#include "doiflow/perturbation.hpp"
#include "doiflow/rng.hpp"

using namespace doiflow;

TEST(OperatorPath, DomainAndDerivativeDefect) {
    const Model m = two_level_model();
    EXPECT_THROW(m.path.require(1.5), DomainError);
    EXPECT_NO_THROW(m.path.require(1.0));
    const std::vector<double> samples{0.1, 0.5, 0.9};
    EXPECT_LT(m.path.derivative_defect_constant(samples), 1e-3);

    CounterRng rng(41);
    const OperatorPath trig = trigonometric_path(random_hermitian(rng, 4), random_hermitian(rng, 4),
                                                 random_hermitian(rng, 4), {-1.0, 1.0});
    EXPECT_LT(trig.derivative_defect_constant(samples), 10.0);
    const OperatorPath poly = polynomial_path(random_hermitian(rng, 3), {random_hermitian(rng, 3),
                                                                          random_hermitian(rng, 3)}, {0.0, 1.0});
    EXPECT_LT(poly.derivative_defect_constant(samples), 10.0);
}

TEST(FDifference, Examples) {
    CounterRng rng(42);
    const HermitianMatrix a = random_hermitian(rng, 5);
    const FDifference zero = f_difference(a, HermitianMatrix(ComplexMatrix(5, 5)), function_exp());
    EXPECT_LT(zero.doi.max_abs(), 1e-13);
    EXPECT_LT(zero.direct.max_abs(), 1e-13);

    const HermitianMatrix phi = random_hermitian(rng, 5);
    const FDifference sq = f_difference(a, phi, function_square());
    const ComplexMatrix& am = a.matrix();
    const ComplexMatrix& pm = phi.matrix();
    const ComplexMatrix expected = am * pm + pm * am + pm * pm;
    EXPECT_LT(max_abs_diff(sq.doi, expected), 1e-12);
    EXPECT_LT(max_abs_diff(sq.direct, expected), 1e-12);

    const HermitianMatrix a8 = random_hermitian(rng, 8);
    const HermitianMatrix g = random_hermitian(rng, 8);
    const HermitianMatrix p8((0.3 / op_norm(g.matrix())) * g.matrix());
    const FDifference ex = f_difference(a8, p8, function_exp());
    EXPECT_LT(ex.residual, 1e-8);
    EXPECT_TRUE(ex.ok());
    EXPECT_LT(op_norm(f_difference_swapped(a8, p8, function_exp()) - ex.direct), 1e-8);
}

TEST(ExpDifferenceBound, Examples) {
    CounterRng rng(43);
    const HermitianMatrix a = random_hermitian(rng, 4);
    const HermitianMatrix phi = random_hermitian(rng, 4);
    const ExpDifferenceBound z = exp_difference_bound(a, phi, 0.0);
    EXPECT_EQ(z.lhs_norm, 0.0);
    EXPECT_EQ(z.bound, 0.0);
    EXPECT_TRUE(z.ok);

    const ExpDifferenceBound s = exp_difference_bound(HermitianMatrix{{0.0}}, HermitianMatrix{{std::numbers::pi}}, 1.0);
    EXPECT_NEAR(s.lhs_norm, 2.0, 1e-15);
    EXPECT_NEAR(s.bound, std::numbers::pi, 1e-15);
    EXPECT_TRUE(s.ok);
}

TEST(DaletskiiKrein, Examples) {
    CounterRng rng(44);
    const HermitianMatrix h0 = random_hermitian(rng, 6);
    const HermitianMatrix v = random_hermitian(rng, 6);
    const OperatorPath path = linear_path(h0, v, {0.0, 1.0});
    EXPECT_LT(max_abs_diff(dk_derivative(path, 0.4, function_identity()), v.matrix()), 1e-13);
    const ComplexMatrix a = path.hamiltonian(0.4).matrix();
    EXPECT_LT(max_abs_diff(dk_derivative(path, 0.4, function_square()), a * v.matrix() + v.matrix() * a), 1e-12);

    const Model two = two_level_model();
    const ComplexMatrix dk = dk_derivative(two.path, 0.5, function_exp());
    EXPECT_LT(op_norm(fd_derivative(two.path, 0.5, function_exp(), 1e-4) - dk) / op_norm(dk), 1e-6);
}

TEST(FdDerivative, Examples) {
    CounterRng rng(45);
    const HermitianMatrix h0 = random_hermitian(rng, 4);
    const HermitianMatrix zero(ComplexMatrix(4, 4));
    const OperatorPath flat = linear_path(h0, zero, {0.0, 1.0});
    EXPECT_LT(fd_derivative(flat, 0.5, function_exp(), 1e-4).max_abs(), 1e-10 / 1e-4);

    const HermitianMatrix v = random_hermitian(rng, 4);
    const OperatorPath path = linear_path(h0, v, {0.0, 1.0});
    EXPECT_LT(max_abs_diff(fd_derivative(path, 0.5, function_identity(), 1e-4), v.matrix()), 1e-10);

    const Model two = two_level_model();
    const ComplexMatrix dk = dk_derivative(two.path, 0.5, function_exp());
    const double e1 = op_norm(fd_derivative(two.path, 0.5, function_exp(), 1e-3) - dk);
    const double e2 = op_norm(fd_derivative(two.path, 0.5, function_exp(), 5e-4) - dk);
    EXPECT_NEAR(e1 / e2, 4.0, 0.1);

    EXPECT_THROW(fd_derivative(two.path, 0.0, function_exp(), 1e-4), DomainError);
    EXPECT_THROW(fd_derivative(two.path, 0.5, function_exp(), 0.0), InvalidInput);
}

TEST(Duhamel, Examples) {
    const Model two = two_level_model();
    EXPECT_EQ(duhamel_derivative(two.path, 0.3, 0.0).max_abs(), 0.0);

    const OperatorPath scalar = linear_path(HermitianMatrix{{0.0}}, HermitianMatrix{{1.0}}, {0.0, 2.0});
    const double t = 1.7, s = 0.6;
    EXPECT_NEAR(std::abs(duhamel_derivative(scalar, s, t)(0, 0) - kI * t * std::exp(kI * t * s)), 0.0, 1e-14);

    const ComplexMatrix dh = duhamel_derivative(two.path, 0.5, 1.0);
    EXPECT_LT(op_norm(dh - dk_derivative(two.path, 0.5, function_exp_i(1.0))), 1e-8);
}
