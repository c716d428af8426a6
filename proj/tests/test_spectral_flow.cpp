#include <gtest/gtest.h>

#include <cmath>

#include "doiflow/models.hpp"
#include "doiflow/rng.hpp"
#include "doiflow/spectral_flow.hpp"

using namespace doiflow;

namespace {

HermitianMatrix diag(std::vector<double> d) {
    return HermitianMatrix(ComplexMatrix::diagonal(std::span<const double>(d)));
}

}  // namespace

TEST(WeightFunction, Normalization) {
    for (double g : {0.5, 1.0, 2.0, 5.0}) {
        const WeightFunction wf = build_weight_function(g);
        EXPECT_NEAR(wf.integral(), 1.0, 1e-8) << g;
        EXPECT_NEAR(wf.reconstruct_profile(0.0), 1.0, 1e-8) << g;
        EXPECT_LT(std::abs(wf.first_moment()), 1e-8) << g;
        for (double xi : {1.05 * g, 2.0 * g, 7.3 * g, 10.0 * g}) EXPECT_LT(std::abs(wf.reconstruct_profile(xi)), 1e-6);
    }
}

// Reference values from 30-digit adaptive quadrature of the cosine transform.
TEST(WeightFunction, PointValues) {
    const WeightFunction w1 = build_weight_function(1.0);
    EXPECT_NEAR(w1(0.0), 0.19208415213519031, 1e-13);
    EXPECT_NEAR(w1(1.0), 0.17731653251283290, 1e-13);
    EXPECT_NEAR(w1(-3.0), 0.085618391258519781, 1e-13);
    const WeightFunction w2 = build_weight_function(2.0);
    EXPECT_NEAR(w2(0.0), 0.38416830427038063, 1e-13);
    EXPECT_NEAR(w2(3.0), -0.034002446919124295, 1e-13);
    EXPECT_EQ(w1.profile(1.0), 0.0);
    EXPECT_EQ(w1.profile(-1.5), 0.0);
    EXPECT_DOUBLE_EQ(w1.profile(0.0), 1.0);
}

TEST(WeightFunction, ShortWindowIsTruncation) {
    WeightFunctionOptions o;
    o.t_max_factor = 200.0;
    EXPECT_THROW(build_weight_function(1.0, o), TruncationError);
    EXPECT_THROW(build_weight_function(-1.0), InvalidInput);
}

TEST(DetectPatch, Examples) {
    const SpectralPatch p = detect_patch(hermitian_eig(diag({0.0, 5.0})), {-1.0, 1.0}, 2.0);
    EXPECT_EQ(p.rank, 1u);
    EXPECT_LT(max_abs_diff(p.projector, ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}), 1e-15);
    EXPECT_NEAR(p.interval_distance, 4.0, 1e-15);

    EXPECT_THROW(detect_patch(hermitian_eig(diag({0.0, 1.0})), {-0.5, 0.5}, 2.0), GapError);
    EXPECT_THROW(detect_patch(hermitian_eig(diag({0.0, 1.0})), {-5.0, 5.0}, 0.1), PatchError);
    EXPECT_THROW(detect_patch(hermitian_eig(diag({0.0, 1.0})), {3.0, 4.0}, 0.1), PatchError);
}

// sigma_z + s sigma_x with I = [-sqrt(1 + s^2) - 0.1, 0]: only isolated by 2 once s >= sqrt(3).
TEST(DetectPatch, TwoLevelInterval) {
    auto h = [](double s) { return HermitianMatrix{{1.0, s}, {s, -1.0}}; };
    auto interval = [](double s) { return Interval{-std::sqrt(1.0 + s * s) - 0.1, 0.0}; };
    const SpectralPatch p = detect_patch(hermitian_eig(h(2.0)), interval(2.0), 2.0);
    ASSERT_EQ(p.inside.size(), 1u);
    EXPECT_EQ(p.inside[0], 0u);
    EXPECT_THROW(detect_patch(hermitian_eig(h(0.0)), interval(0.0), 2.0), GapError);
}

TEST(Riesz, Examples) {
    const HermitianMatrix h = diag({0.0, 5.0});
    const ComplexMatrix p = riesz_projection(h, Contour{0.0, 4.0, 64});
    EXPECT_LT(op_norm(p - ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}), 1e-10);
    EXPECT_LT(op_norm(riesz_projection(h, Contour{2.5, 12.0, 64}) - ComplexMatrix::identity(2)), 1e-10);
    EXPECT_LT(op_norm(riesz_projection(h, Contour{20.0, 2.0, 64})), 1e-10);
    EXPECT_THROW(riesz_projection(h, Contour{0.0, 9.9, 64}, 0.5), ContourError);
    const ComplexMatrix spectral = riesz_projection(h, Contour{0.0, 4.0, 64}, 0.0, ResolventMethod::spectral);
    EXPECT_LT(op_norm(spectral - p), 1e-13);
}

// Trapezoid error decays like (rho / R)^n; an interval twice as wide as gamma
// puts inside atoms closer to the circle and 64 nodes no longer reach 1e-10.
TEST(Riesz, WideIntervalDegrades) {
    const double gamma = 1.0;
    const Interval narrow{0.0, 1.0};
    const Interval wide{0.0, 2.0 * gamma};
    const HermitianMatrix h_narrow = diag({0.0, 1.0, 2.0 + 1.0001 * gamma});
    const HermitianMatrix h_wide = diag({0.0, 2.0, 2.0 + 1.0001 * gamma});
    const double e_narrow = op_norm(riesz_projection(h_narrow, contour_for_patch(narrow, gamma)) -
                                    diag({1.0, 1.0, 0.0}).matrix());
    const double e_wide =
        op_norm(riesz_projection(h_wide, contour_for_patch(wide, gamma)) - diag({1.0, 1.0, 0.0}).matrix());
    EXPECT_LT(e_narrow, 1e-10);
    EXPECT_GT(e_wide, 1e-10);
    EXPECT_LT(op_norm(riesz_projection(h_wide, contour_for_patch(wide, gamma, 256)) -
                      diag({1.0, 1.0, 0.0}).matrix()),
              1e-10);
}

TEST(HastingsKernel, Examples) {
    const WeightFunction wf = build_weight_function(1.5);
    EXPECT_NEAR(std::abs(hastings_spectral_weight(wf, 3.0) - Complex(0.0, 1.0 / 3.0)), 0.0, 1e-15);
    EXPECT_EQ(hastings_spectral_weight(wf, 0.0), Complex(0.0));
    EXPECT_NEAR(std::abs(hastings_spectral_weight(wf, -3.0) - std::conj(hastings_spectral_weight(wf, 3.0))), 0.0,
                1e-15);
    EXPECT_NEAR(std::abs(hastings_kernel(wf)(1.0, 0.4) - hastings_spectral_weight(wf, 0.6)), 0.0, 1e-15);
}

TEST(HastingsGenerator, Examples) {
    CounterRng rng(51);
    const WeightFunction wf = build_weight_function(1.0);
    const auto eig = hermitian_eig(random_hermitian(rng, 5));
    EXPECT_EQ(hastings_generator(eig, ComplexMatrix(5, 5), wf).matrix().max_abs(), 0.0);

    const Model two = two_level_model();
    const WeightFunction w2 = build_weight_function(two.gamma);
    const HermitianMatrix closed = hastings_generator(two.path, 0.0, w2, GeneratorMethod::closed_form);
    const HermitianMatrix quad = hastings_generator(two.path, 0.0, w2, GeneratorMethod::quadrature);
    EXPECT_LT(op_norm(closed.matrix() - quad.matrix()), 1e-6);
    EXPECT_LE(op_norm(closed.matrix()), op_norm(two.path.phi_prime(0.0).matrix()) * w2.abs_first_moment());
}

TEST(CommutatorIdentity, ConstantPath) {
    const OperatorPath flat = linear_path(diag({-1.0, 3.0, 4.0}), diag({0.0, 0.0, 0.0}), {0.0, 1.0});
    const WeightFunction wf = build_weight_function(1.0);
    const CommutatorCheck c = commutator_identity_check(flat, 0.5, wf, [](double) { return Interval{-1.5, -0.5}; });
    EXPECT_LT(c.residual, 1e-14);
    EXPECT_LT(c.p_prime_norm, 1e-14);
    EXPECT_LT(c.commutator_norm, 1e-14);
}

TEST(CommutatorIdentity, TwoLevel) {
    const Model two = two_level_model();
    const WeightFunction wf = build_weight_function(two.gamma);
    for (double s : {0.0, 0.5, 1.0}) {
        const CommutatorCheck c = commutator_identity_check(two.path, s, wf, two.interval);
        EXPECT_LT(c.residual, 1e-6) << s;
        EXPECT_TRUE(c.ok());
        EXPECT_GT(c.p_prime_norm, 0.1);
        if (c.fd_residual) EXPECT_LT(*c.fd_residual, 1e-6);
    }
}

TEST(CommutatorIdentity, TfimSix) {
    const Model tfim = tfim_model(6);
    const WeightFunction wf = build_weight_function(tfim.gamma);
    const CommutatorCheck c = commutator_identity_check(tfim.path, 0.2, wf, tfim.interval);
    EXPECT_LT(c.residual, 1e-5);
    ASSERT_TRUE(c.fd_residual.has_value());
    EXPECT_LT(*c.fd_residual, 1e-6);
    EXPECT_EQ(c.patch.rank, 2u);
}

TEST(Flow, ZeroGeneratorKeepsIdentity) {
    const OperatorPath flat = linear_path(diag({-1.0, 3.0}), diag({0.0, 0.0}), {0.0, 1.0});
    const WeightFunction wf = build_weight_function(1.0);
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    const FlowResult r = flow_integrate(flat, [](double) { return Interval{-1.5, -0.5}; }, wf, grid);
    ASSERT_TRUE(r.complete());
    for (const ComplexMatrix& u : r.unitaries) EXPECT_LT(max_abs_diff(u, ComplexMatrix::identity(2)), 1e-15);
}

TEST(Flow, TwoLevelConvergence) {
    const Model two = two_level_model();
    const WeightFunction wf = build_weight_function(two.gamma);
    auto grid = [](std::size_t steps) {
        std::vector<double> g(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k) g[k] = static_cast<double>(k) / static_cast<double>(steps);
        return g;
    };
    const FlowResult coarse = flow_integrate(two.path, two.interval, wf, grid(100));
    const FlowResult fine = flow_integrate(two.path, two.interval, wf, grid(200));
    const EquivalenceReport a = verify_automorphic_equivalence(coarse);
    const EquivalenceReport b = verify_automorphic_equivalence(fine);
    EXPECT_EQ(a.errors.front(), 0.0);
    EXPECT_LT(a.max_error, 1e-4);
    EXPECT_GT(a.max_error / b.max_error, 3.0);
    EXPECT_LT(a.max_error / b.max_error, 5.0);
    EXPECT_LT(b.max_unitarity_defect, 1e-8);
    EXPECT_TRUE(b.rank_constant);
    EXPECT_EQ(fine.diagnostics.size(), 201u);
    EXPECT_NEAR(fine.diagnostics.back().transport_error, b.errors.back(), 1e-12);
}

TEST(Flow, KeepEveryStoresSubset) {
    const Model two = two_level_model();
    const WeightFunction wf = build_weight_function(two.gamma);
    std::vector<double> g(51);
    for (std::size_t k = 0; k <= 50; ++k) g[k] = static_cast<double>(k) / 50.0;
    FlowOptions o;
    o.keep_every = 10;
    const FlowResult r = flow_integrate(two.path, two.interval, wf, g, o);
    EXPECT_EQ(r.stored_index, (std::vector<std::size_t>{0, 10, 20, 30, 40, 50}));
    EXPECT_EQ(r.unitaries.size(), 6u);
}

TEST(Flow, GapViolationStopsEarly) {
    // The upper level comes within gamma of the interval once s > 0.65.
    const OperatorPath path = linear_path(diag({-1.0, 1.0}), diag({0.0, -2.0}), {0.0, 1.0});
    const WeightFunction wf = build_weight_function(0.5);
    std::vector<double> g(11);
    for (std::size_t k = 0; k <= 10; ++k) g[k] = 0.1 * static_cast<double>(k);
    const FlowResult r = flow_integrate(path, [](double) { return Interval{-1.2, -0.8}; }, wf, g);
    EXPECT_FALSE(r.complete());
    EXPECT_LT(r.diagnostics.size(), g.size());
    EXPECT_GT(r.diagnostics.size(), 1u);
}
