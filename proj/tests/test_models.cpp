#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "doiflow/models.hpp"

using namespace doiflow;

TEST(TwoLevel, IntervalTracksLowerLevel) {
    const Model m = two_level_model();
    EXPECT_EQ(m.gamma, 2.0);
    for (double s : {0.0, 0.5, 1.0}) {
        const auto eig = hermitian_eig(m.path.hamiltonian(s));
        EXPECT_NEAR(eig.eigenvalues[0], -std::sqrt(1.0 + s * s), 1e-14);
        const Interval in = m.interval(s);
        EXPECT_NEAR(in.hi, eig.eigenvalues[0], 1e-14);
    }
    EXPECT_THROW(two_level_model(std::nan("")), InvalidInput);
}

TEST(Tfim, FreeFermionsMatchExactDiagonalization) {
    for (std::size_t n : {2u, 4u, 6u}) {
        const Model m = tfim_model(n);
        for (double s : {0.0, 0.2, 0.5}) {
            const auto eig = hermitian_eig(m.path.hamiltonian(s));
            const auto e = tfim_low_energies(n, s);
            EXPECT_NEAR(e[0], eig.eigenvalues[0], 1e-11) << n << " " << s;
            EXPECT_NEAR(e[1], eig.eigenvalues[1], 1e-11) << n << " " << s;
            EXPECT_NEAR(e[2], eig.eigenvalues[2], 1e-11) << n << " " << s;
        }
    }
}

TEST(Tfim, ExactDiagonalizationReference) {
    // Four sites at s = 0.3, from an independent dense eigensolver.
    const auto e = tfim_low_energies(4, 0.3);
    EXPECT_NEAR(e[0], -3.1433268, 1e-7);
    EXPECT_NEAR(e[1], -3.12858136, 1e-7);
    EXPECT_NEAR(e[2], -1.47499049, 1e-7);
}

TEST(Tfim, SiteLimits) {
    EXPECT_THROW(tfim_model(1), InvalidInput);
    EXPECT_THROW(tfim_model(9), InvalidInput);
}

TEST(RandomGapped, Construction) {
    const Model m = random_gapped_model(8, 2.0, 0.25, 1234);
    EXPECT_EQ(m.gamma, 1.0);
    EXPECT_NEAR(op_norm(m.path.phi_prime(0.3).matrix()), 0.25, 1e-12);
    const Model same = random_gapped_model(8, 2.0, 0.25, 1234);
    EXPECT_EQ(m.path.hamiltonian(0.7).matrix(), same.path.hamiltonian(0.7).matrix());
    EXPECT_THROW(random_gapped_model(8, 2.0, 0.6, 1), InvalidInput);
    EXPECT_THROW(random_gapped_model(1, 2.0, 0.1, 1), InvalidInput);
}

TEST(ValidateModel, BuiltInsPass) {
    const ModelValidation two = validate_model(two_level_model());
    EXPECT_EQ(two.rank, 1u);
    EXPECT_GE(two.min_interval_distance, 2.0);
    const ModelValidation gap = validate_model(random_gapped_model(10, 2.0, 0.25, 99));
    EXPECT_EQ(gap.rank, 5u);
    const ModelValidation tfim = validate_model(tfim_model(5));
    EXPECT_EQ(tfim.rank, 2u);
    EXPECT_EQ(tfim.samples, 33u);
}

TEST(ValidateModel, RejectsBadGamma) {
    Model m = two_level_model();
    m.gamma = 5.0;
    EXPECT_THROW(validate_model(m), GapError);
}
