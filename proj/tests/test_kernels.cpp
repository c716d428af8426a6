#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "doiflow/doi.hpp"
#include "doiflow/kernels.hpp"
#include "doiflow/rng.hpp"

using namespace doiflow;

namespace {

FinitePVM atoms_at(std::vector<double> d) {
    return pvm_from_hermitian(HermitianMatrix(ComplexMatrix::diagonal(std::span<const double>(d))), 1e-9);
}


Complex phi_t(double t, double x, double y) {
    if (x == y) return kI * t * std::exp(kI * t * x);
    return (std::exp(kI * t * x) - std::exp(kI * t * y)) / (x - y);
}

}  // namespace

TEST(Kernel, Basics) {
    EXPECT_EQ(kernel_const_one()(3.7, -2.0), Complex(1.0));
    EXPECT_EQ(kernel_left([](double x) { return Complex(x * x); })(2.0, 99.0), Complex(4.0));
    EXPECT_EQ(kernel_right([](double y) { return Complex(std::exp(y)); })(99.0, 0.0), Complex(1.0));
    EXPECT_THROW(Kernel([](double, double) { return Complex(std::nan("")); }, "nan"), DomainError);
}

TEST(DecomposedKernel, SumAndProduct) {
    const DecomposedKernel k = exp_kernel(1.5);
    const DecomposedKernel s = decomposed_sum(k, decomposed_zero());
    const DecomposedKernel p = decomposed_product(k, decomposed_const_one());
    EXPECT_EQ(s.size(), k.size());
    for (double x : {-1.0, 0.3, 2.0})
        for (double y : {-0.5, 0.3, 1.7}) {
            EXPECT_NEAR(std::abs(s(x, y) - k(x, y)), 0.0, 1e-15);
            EXPECT_NEAR(std::abs(p(x, y) - k(x, y)), 0.0, 1e-15);
        }

    const DecomposedKernel kx = decomposed_separated([](double x) { return Complex(x); },
                                                     [](double) { return Complex(1.0); });
    const DecomposedKernel ky = decomposed_separated([](double) { return Complex(1.0); },
                                                     [](double y) { return Complex(y); });
    const DecomposedKernel xy = decomposed_product(kx, ky);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double x = -2.0 + i, y = -1.0 + 0.5 * j;
            EXPECT_NEAR(std::abs(xy(x, y) - x * y), 0.0, 1e-14);
        }
}

TEST(DecomposedKernel, Validation) {
    DecomposedKernel k = decomposed_const_one();
    k.weights[0] = -1.0;
    EXPECT_THROW(k.validate(), InvalidInput);
    k.weights.push_back(1.0);
    EXPECT_THROW(k.validate(), InvalidInput);
}

TEST(MnormUpperBound, Examples) {
    const FinitePVM e = atoms_at({-1.0, 0.0, 2.0});
    const double b = mnorm_upper_bound(exp_kernel(2.0), e, e);
    EXPECT_LE(b, 2.0 + 1e-12);
    EXPECT_GE(b, 2.0 - 1e-12);
    EXPECT_DOUBLE_EQ(mnorm_upper_bound(decomposed_const_one(), e, e), 1.0);
    const DecomposedKernel k = decomposed_separated([](double) { return Complex(3.0); },
                                                    [](double) { return Complex(5.0); }, 2.0);
    EXPECT_NEAR(mnorm_upper_bound(k, e, e), 30.0, 1e-13);
}

TEST(ExpKernel, Examples) {
    EXPECT_EQ(exp_kernel(0.0).size(), 0u);
    EXPECT_EQ(exp_kernel(0.0)(0.4, 1.0), Complex(0.0));
    EXPECT_NEAR(std::abs(exp_kernel(1.0)(0.0, 0.0) - kI), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(exp_kernel(1.0)(std::numbers::pi, -std::numbers::pi)), 0.0, 1e-14);
}

// The accuracy table documented on exp_kernel.
TEST(ExpKernel, AccuracyTable) {
    struct Row {
        std::size_t nodes;
        double reach;  // |t| |x - y|
        double tol;
    };
    for (const Row& r : {Row{16, 10.0, 1e-13}, Row{32, 30.0, 1e-12}, Row{64, 80.0, 1e-12}}) {
        double worst = 0.0;
        for (double t : {-2.0, 0.7, 2.0}) {
            const DecomposedKernel k = exp_kernel(t, r.nodes);
            const double span = r.reach / std::abs(t);
            for (int i = 0; i <= 40; ++i) {
                const double x = -0.5 * span + span * i / 40.0;
                const double y = -0.5 * span;
                worst = std::max(worst, std::abs(k(x, y) - phi_t(t, x, y)));
            }
        }
        EXPECT_LT(worst, r.tol) << r.nodes << " nodes";
    }
}

TEST(DividedDifference, Examples) {
    EXPECT_NEAR(std::abs(divided_difference_kernel(function_square())(1.0, 3.0) - 4.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(divided_difference_kernel(function_identity())(-2.0, 0.5) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(divided_difference_kernel(function_exp())(0.0, 1.0).real(), 1.718281828459045, 1e-14);
}

TEST(DividedDifference, DiagonalConsistency) {
    const Kernel k = divided_difference_kernel(function_exp());
    for (double x : {-1.0, -0.3, 0.5, 1.0}) {
        double prev = 1.0;
        for (double eps : {1e-3, 1e-5, 1e-7}) {
            const double err = std::abs(k(x, x + eps) - std::exp(x));
            EXPECT_LT(err, prev);
            prev = err;
        }
    }
}

TEST(DividedDifferenceDecomposed, Examples) {
    const DecomposedKernel from_atom = divided_difference_decomposed(wiener_exp_i(1.3));
    const DecomposedKernel direct = exp_kernel(1.3);
    for (double x : {-2.0, 0.0, 1.1})
        for (double y : {-1.0, 0.0, 2.5}) EXPECT_NEAR(std::abs(from_atom(x, y) - direct(x, y)), 0.0, 1e-14);

    const DecomposedKernel cosk = divided_difference_decomposed(wiener_cos(2.0));
    EXPECT_NEAR(std::abs(cosk(0.0, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(cosk(0.4, 0.4) + 2.0 * std::sin(0.8)), 0.0, 1e-13);

    EXPECT_NEAR(std::abs(wiener_eval(wiener_lorentzian(), 0.0) - 1.0), 0.0, 1e-8);
}

TEST(Wiener, Examples) {
    const WienerFunction one(FourierMeasure::atoms({{0.0, 1.0}}));
    EXPECT_NEAR(std::abs(wiener_eval(one, 2.3) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(wiener_deriv(one, 2.3), Complex(0.0));
    EXPECT_NEAR(std::abs(wiener_eval(wiener_exp_i(0.8), 1.5) - std::exp(kI * 1.2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(wiener_eval(wiener_lorentzian(), 1.0) - 0.5), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(wiener_deriv(wiener_lorentzian(), 1.0) + 0.5), 0.0, 1e-8);
    // A closed form that disagrees with its measure is rejected.
    EXPECT_THROW(WienerFunction(FourierMeasure::atoms({{1.0, 1.0}}), function_sin()), InvalidInput);
}
