#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "doiflow/doi.hpp"
#include "doiflow/rng.hpp"

using namespace doiflow;

namespace {

FinitePVM atoms_at(std::vector<double> d) {
    return pvm_from_hermitian(HermitianMatrix(ComplexMatrix::diagonal(std::span<const double>(d))), 1e-9);
}

const Kernel kDifference([](double x, double y) { return Complex(x - y); }, "x - y");

}  // namespace

TEST(SchurMatrix, Examples) {
    const FinitePVM e = atoms_at({0.0, 1.0});
    const ComplexMatrix ones = schur_matrix(kernel_const_one(), e, atoms_at({-1.0, 0.0, 4.0}));
    for (Complex z : ones.entries()) EXPECT_EQ(z, Complex(1.0));
    EXPECT_LT(max_abs_diff(schur_matrix(kDifference, e, e), ComplexMatrix{{0.0, -1.0}, {1.0, 0.0}}), 1e-15);
    const double em1 = std::numbers::e - 1.0;
    EXPECT_LT(max_abs_diff(schur_matrix(divided_difference_kernel(function_exp()), e, e),
                           ComplexMatrix{{1.0, em1}, {em1, std::numbers::e}}),
              1e-15);
    const Kernel bad([](double x, double) { return Complex(x > 0.5 && x < 1.5 ? std::nan("") : 0.0); }, "bad", 0.0);
    EXPECT_THROW(schur_matrix(bad, e, e), DomainError);
}

TEST(DoiApply, Examples) {
    CounterRng rng(31);
    const FinitePVM e = pvm_from_hermitian(random_hermitian(rng, 5));
    const FinitePVM f = pvm_from_hermitian(random_hermitian(rng, 3));
    const ComplexMatrix t = random_complex_matrix(rng, 5, 3);
    EXPECT_LT(max_abs_diff(doi_apply(kernel_const_one(), e, f, t), t), 1e-14);

    const ScalarFunction alpha = [](double x) { return Complex(std::cos(x), x); };
    const ScalarFunction beta = [](double y) { return Complex(y * y); };
    const Kernel sep = kernel_product(kernel_left(alpha), kernel_right(beta));
    EXPECT_LT(max_abs_diff(doi_apply(sep, e, f, t), integrate_scalar(e, alpha) * t * integrate_scalar(f, beta)),
              1e-13);

    const FinitePVM x = pvm_from_hermitian(HermitianMatrix{{0.0, 1.0}, {1.0, 0.0}}, 1e-9);
    const Kernel xy([](double a, double b) { return Complex(a * b); }, "xy");
    const ComplexMatrix out = doi_apply(xy, x, x, ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}});
    EXPECT_LT(max_abs_diff(out, ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}}), 1e-15);

    EXPECT_THROW(doi_apply(kernel_const_one(), e, f, random_complex_matrix(rng, 3, 5)), ShapeError);
}

TEST(DoiApplyDecomposed, Examples) {
    CounterRng rng(32);
    const FinitePVM e = pvm_from_hermitian(random_hermitian(rng, 6));
    const FinitePVM f = pvm_from_hermitian(random_hermitian(rng, 4));
    const ComplexMatrix t = random_complex_matrix(rng, 6, 4);

    const ScalarFunction alpha = [](double x) { return Complex(x, 1.0); };
    const ScalarFunction beta = [](double y) { return std::exp(kI * y); };
    EXPECT_LT(max_abs_diff(doi_apply_decomposed(decomposed_separated(alpha, beta), e, f, t),
                           integrate_scalar(e, alpha) * t * integrate_scalar(f, beta)),
              1e-13);

    for (double s : {-2.0, 0.8}) {
        const DecomposedKernel k = exp_kernel(s);
        EXPECT_LT(op_norm(doi_apply(k.induced(), e, f, t) - doi_apply_decomposed(k, e, f, t)), 1e-11);
    }
    EXPECT_EQ(doi_apply_decomposed(decomposed_zero(), e, f, t).max_abs(), 0.0);
}

TEST(DoiS2Norm, Examples) {
    const FinitePVM e = atoms_at({0.0, 1.0});
    const Kernel c([](double, double) { return Complex(0.0, -2.5); }, "c");
    EXPECT_DOUBLE_EQ(doi_s2_norm(c, e, e), 2.5);
    EXPECT_DOUBLE_EQ(doi_s2_norm(kDifference, e, e), 1.0);
    // On {0, 1, 2} the largest entry is the diagonal f'(2) = e^2; off the
    // diagonal the maximum is (e^2 - e)/1.
    const FinitePVM three = atoms_at({0.0, 1.0, 2.0});
    const Kernel phi_exp = divided_difference_kernel(function_exp());
    EXPECT_NEAR(doi_s2_norm(phi_exp, three, three), 7.38905609893065, 1e-13);
    EXPECT_NEAR(doi_s2_norm(phi_exp, atoms_at({1.0}), atoms_at({2.0})), 4.670774270471605, 1e-13);
}

TEST(TracePairing, Examples) {
    CounterRng rng(33);
    const FinitePVM e = pvm_from_hermitian(random_hermitian(rng, 6));
    const FinitePVM f = pvm_from_hermitian(random_hermitian(rng, 6));
    const DecomposedKernel k = exp_kernel(1.0);
    const ComplexMatrix t = random_complex_matrix(rng, 6, 6);

    const ComplexVector v = random_complex_vector(rng, 6);
    const ComplexVector w = random_complex_vector(rng, 6);
    const TracePairing rank_one = trace_pairing(k, e, f, ComplexMatrix::outer(v, w), t);
    const Complex mel = inner(v, doi_apply(k.induced(), e, f, t) * std::span<const Complex>(w));
    EXPECT_NEAR(std::abs(rank_one.value - mel), 0.0, 1e-12);

    const TracePairing zero = trace_pairing(k, e, f, t, ComplexMatrix(6, 6));
    EXPECT_EQ(zero.value, Complex(0.0));
    EXPECT_EQ(zero.decomposed, Complex(0.0));

    EXPECT_TRUE(trace_pairing(k, e, f, random_complex_matrix(rng, 6, 6), t).ok());
}

TEST(DoiAdjoint, Examples) {
    CounterRng rng(34);
    const FinitePVM e = pvm_from_hermitian(random_hermitian(rng, 5));
    const HermitianMatrix t = random_hermitian(rng, 5);
    const Kernel sym([](double x, double y) { return Complex(1.0 / (1.0 + (x - y) * (x - y))); }, "sym");
    const ComplexMatrix out = doi_apply(sym, e, e, t.matrix());
    EXPECT_LT(max_abs_diff(out, out.adjoint()), 1e-14);

    const Kernel ci([](double, double) { return kI; }, "i");
    EXPECT_LT(max_abs_diff(doi_apply(ci, e, e, t.matrix()).adjoint(), Complex(0.0, -1.0) * t.matrix()), 1e-14);

    for (int k = 0; k < 5; ++k) {
        const FinitePVM a = pvm_from_hermitian(random_hermitian(rng, 1 + rng.uniform_index(0, 11)));
        const FinitePVM b = pvm_from_hermitian(random_hermitian(rng, 1 + rng.uniform_index(0, 11)));
        const double p = rng.uniform(-1.0, 1.0);
        const Kernel phi([p](double x, double y) { return std::exp(kI * p * x * y) / (2.0 + std::sin(x)); }, "phi");
        EXPECT_TRUE(doi_adjoint_check(phi, a, b, random_complex_matrix(rng, a.dim(), b.dim())).ok());
    }
}
