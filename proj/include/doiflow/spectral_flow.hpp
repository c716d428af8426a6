#pragma once

// Isolated spectral patches of H(s), contour (Riesz) projections, the
// band-limited weight function w_gamma, the Hastings generator D(s), and the
// flow U' = i D U that transports P(s0) to P(s).

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "doiflow/kernels.hpp"
#include "doiflow/matrix.hpp"
#include "doiflow/perturbation.hpp"
#include "doiflow/pvm.hpp"
#include "doiflow/quadrature.hpp"

namespace doiflow {

struct WeightFunctionOptions {
    double profile_sharpness = 1.0;
    std::size_t fourier_nodes = 200;
    double t_max_factor = 400.0;
};

/// w(t) = (1/2pi) int_{-gamma}^{gamma} what(xi) cos(xi t) dxi for the bump
/// profile what(xi) = exp(k (1 - 1/(1 - (xi/gamma)^2))), k the sharpness.
/// Construction samples w on [-t_max, t_max] and throws TruncationError if
/// the mass of |t w(t)| beyond t_max exceeds 1e-6 of the total.
class WeightFunction {
public:
    explicit WeightFunction(double gamma, const WeightFunctionOptions& options = {});

    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double t_max() const noexcept { return t_max_; }
    [[nodiscard]] const WeightFunctionOptions& options() const noexcept { return options_; }

    /// what(xi); exactly zero for |xi| >= gamma.
    [[nodiscard]] double profile(double xi) const;
    /// what(xi) - 1 without cancellation near 0.
    [[nodiscard]] double profile_minus_one(double xi) const;
    [[nodiscard]] double operator()(double t) const;

    [[nodiscard]] const Quadrature& t_samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    /// int w dt over [-t_max, t_max].
    [[nodiscard]] double integral() const noexcept { return integral_; }
    [[nodiscard]] double first_moment() const noexcept { return first_moment_; }
    /// int |t w(t)| dt.
    [[nodiscard]] double abs_first_moment() const noexcept { return abs_first_moment_; }
    /// int_{|t| > t_max} |t w(t)| dt, estimated on [t_max, 1.25 t_max].
    [[nodiscard]] double tail_abs_moment() const noexcept { return tail_abs_moment_; }

    /// int w(t) cos(xi t) dt by the t-samples.
    [[nodiscard]] double reconstruct_profile(double xi) const;

private:
    double gamma_;
    WeightFunctionOptions options_;
    double t_max_;
    Quadrature fourier_rule_;  // on [0, gamma], weights premultiplied by what/pi
    Quadrature samples_;
    std::vector<double> values_;
    double integral_ = 0.0;
    double first_moment_ = 0.0;
    double abs_first_moment_ = 0.0;
    double tail_abs_moment_ = 0.0;
};

WeightFunction build_weight_function(double gamma, const WeightFunctionOptions& options = {});

struct SpectralPatch {
    Interval interval;
    double gamma = 0.0;
    std::vector<std::size_t> inside;   // atom indices in the interval
    std::vector<std::size_t> outside;  // the rest
    ComplexMatrix projector;
    /// inf |x1 - x2| over x1 in the interval, x2 outside atoms.
    double interval_distance = 0.0;
    /// min |x1 - x2| over inside atoms x1 and outside atoms x2.
    double spectral_gap = 0.0;
    std::size_t rank = 0;
};

/// PatchError if either side is empty; GapError if the interval comes closer
/// than gamma to an outside atom.
SpectralPatch detect_patch(const FinitePVM& pvm, Interval interval, double gamma);
SpectralPatch detect_patch(const EigenDecomposition& eig, Interval interval, double gamma);

struct Contour {
    double center = 0.0;
    double diameter = 1.0;
    std::size_t n_nodes = 64;

    [[nodiscard]] double theta(std::size_t k) const;
    [[nodiscard]] Complex point(std::size_t k) const;
    /// Gamma'(theta_k) * (2 pi / n_nodes)
    [[nodiscard]] Complex weighted_derivative(std::size_t k) const;
    /// Smallest distance from a node to any of the given real points.
    [[nodiscard]] double min_node_distance(std::span<const double> points) const;
};

/// Circle through c = mid(I), diameter |I| + gamma.
Contour contour_for_patch(const Interval& interval, double gamma, std::size_t n_nodes = 64);
/// ContourError unless every node is at least min_distance from the points.
void validate_contour(const Contour& contour, std::span<const double> points, double min_distance);

enum class ResolventMethod { linear_solve, spectral };

/// P = -(1/2 pi i) sum_k R(z_k) Gamma'(theta_k) dtheta. When min_margin > 0 the
/// node distance to the spectrum is validated first (ContourError).
ComplexMatrix riesz_projection(const HermitianMatrix& h, const Contour& contour, double min_margin = 0.0,
                               ResolventMethod method = ResolventMethod::linear_solve);

/// W(omega) = (what(omega) - 1)/(i omega), W(0) = 0.
Complex hastings_spectral_weight(const WeightFunction& wf, double omega);
/// phi(x, y) = W(x - y).
Kernel hastings_kernel(const WeightFunction& wf);

enum class GeneratorMethod { closed_form, quadrature };

struct GeneratorQuadrature {
    std::size_t t_nodes = 8;        // Gauss-Legendre nodes per outer panel
    std::size_t u_nodes = 8;        // per inner panel
    double max_panel_phase = 1.0;   // panel width * max(gamma, spectral diameter)
};

/// D = int w(t) int_0^t e^{iuH} Phi' e^{-iuH} du dt.
HermitianMatrix hastings_generator(const EigenDecomposition& eig, const ComplexMatrix& phi_prime,
                                   const WeightFunction& wf, GeneratorMethod method = GeneratorMethod::closed_form,
                                   const GeneratorQuadrature& quadrature = {});
HermitianMatrix hastings_generator(const OperatorPath& path, double s, const WeightFunction& wf,
                                   GeneratorMethod method = GeneratorMethod::closed_form,
                                   const GeneratorQuadrature& quadrature = {});

using IntervalFamily = std::function<Interval(double)>;

struct CommutatorOptions {
    std::size_t contour_nodes = 64;
    double fd_step = 1e-3;
    bool fd_check = true;
};

struct CommutatorCheck {
    double residual = 0.0;   // ||P'_contour - i[D, P]||_op
    double tolerance = 0.0;  // 1e-6 (1 + ||Phi'||_op)
    double p_prime_norm = 0.0;
    double commutator_norm = 0.0;
    /// ||P'_contour - P'_fd||_op by 4th-order central differences of the
    /// contour projection; absent when the stencil leaves the path domain.
    std::optional<double> fd_residual;
    SpectralPatch patch;

    [[nodiscard]] bool ok() const noexcept { return residual <= tolerance; }
};

/// P'(s) = (1/2 pi i) sum_k R(z_k) Phi' R(z_k) Gamma'(theta_k) dtheta.
ComplexMatrix contour_projection_derivative(const EigenDecomposition& eig, const ComplexMatrix& phi_prime,
                                            const Contour& contour);

CommutatorCheck commutator_identity_check(const OperatorPath& path, double s, const WeightFunction& wf,
                                          const IntervalFamily& interval, const CommutatorOptions& options = {});

struct FlowOptions {
    std::size_t contour_nodes = 64;
    /// Store U and the patch at every k-th grid point (first and last always).
    std::size_t keep_every = 1;
};

struct FlowStep {
    double s = 0.0;
    double gap = 0.0;
    double min_dist_to_contour = 0.0;
    double commutator_residual = 0.0;
    double transport_error = 0.0;
    double unitarity_defect = 0.0;
};

struct FlowResult {
    std::vector<double> s_grid;
    std::vector<std::size_t> stored_index;  // grid indices of the stored unitaries/patches
    std::vector<ComplexMatrix> unitaries;
    std::vector<SpectralPatch> patches;
    std::vector<FlowStep> diagnostics;       // one per completed grid point
    std::optional<std::string> failure;      // set when the flow stopped early

    [[nodiscard]] bool complete() const noexcept { return !failure; }
};

/// U_{k+1} = exp(i h D(s_k + h/2)) U_k with U(s_0) = 1; the exponential uses
/// the eigendecomposition of D. A GapError mid-flow returns the partial result.
FlowResult flow_integrate(const OperatorPath& path, const IntervalFamily& interval, const WeightFunction& wf,
                          std::span<const double> s_grid, const FlowOptions& options = {});

struct EquivalenceReport {
    double max_error = 0.0;   // max_s ||U P0 U^dagger - P(s)||_op
    double mean_error = 0.0;
    double max_conserved_error = 0.0;  // max_s ||U^dagger P(s) U - P0||_op
    double max_unitarity_defect = 0.0;
    bool rank_constant = true;
    std::vector<double> errors;  // per stored point
};

EquivalenceReport verify_automorphic_equivalence(const FlowResult& result);

/// Operator norm of a Hermitian matrix, max |eigenvalue|.
double hermitian_op_norm(const ComplexMatrix& m);

}  // namespace doiflow
