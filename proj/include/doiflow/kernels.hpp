#pragma once

// Scalar kernels phi(x, y), separated decompositions
//   phi(x, y) = sum_z nu_z alpha_z(x) beta_z(y),   nu_z > 0,
// their algebra, and first-Wiener-class functions f(x) = int e^{itx} dmu(t).

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "doiflow/matrix.hpp"
#include "doiflow/pvm.hpp"

namespace doiflow {

using KernelFunction = std::function<Complex(double, double)>;

class Kernel {
public:
    /// Spot-checks finiteness on a 32 x 32 grid over [-radius, radius]^2.
    Kernel(KernelFunction eval, std::string label, double radius = 4.0);

    Complex operator()(double x, double y) const { return eval_(x, y); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] const KernelFunction& function() const noexcept { return eval_; }

private:
    KernelFunction eval_;
    std::string label_;
};

Kernel kernel_const_one();
Kernel kernel_left(ScalarFunction alpha, std::string label = "left");
Kernel kernel_right(ScalarFunction beta, std::string label = "right");
Kernel kernel_product(const Kernel& a, const Kernel& b);
Kernel kernel_sum(const Kernel& a, const Kernel& b);
Kernel kernel_scale(Complex c, const Kernel& a);

struct DecomposedKernel {
    std::vector<double> weights;  // nu_z, strictly positive
    std::vector<ScalarFunction> alpha;
    std::vector<ScalarFunction> beta;
    std::string label = "decomposed";

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
    [[nodiscard]] Complex operator()(double x, double y) const;
    [[nodiscard]] Kernel induced(double radius = 4.0) const;
    /// Throws InvalidInput on mismatched lists or non-positive weights.
    void validate() const;
};

DecomposedKernel decomposed_zero();
DecomposedKernel decomposed_const_one();
/// Single z with the given nu; a negative or complex scale is folded into alpha.
DecomposedKernel decomposed_separated(ScalarFunction alpha, ScalarFunction beta, Complex scale = 1.0,
                                      std::string label = "separated");
/// Z = Z1 disjoint-union Z2.
DecomposedKernel decomposed_sum(const DecomposedKernel& k1, const DecomposedKernel& k2);
/// Z = Z1 x Z2, nu = nu1 x nu2, alpha and beta multiply pointwise.
DecomposedKernel decomposed_product(const DecomposedKernel& k1, const DecomposedKernel& k2);
/// (alpha*, beta*): decomposition of the conjugate kernel.
DecomposedKernel decomposed_conjugate(const DecomposedKernel& k);

/// sum_z nu_z max_i |alpha_z(x_i)| max_j |beta_z(y_j)| -- the cost of this one
/// decomposition, an upper bound for the integral projective tensor norm.
double mnorm_upper_bound(const DecomposedKernel& k, const FinitePVM& e, const FinitePVM& f);

/// phi_t(x, y) = int_0^1 i t e^{itxr} e^{ity(1-r)} dr with Gauss-Legendre nodes
/// in r; nu_z = |t| w_z, the phase i sign(t) sits in alpha.
///
/// Accuracy of the induced kernel against (e^{itx} - e^{ity})/(x - y):
///   r_nodes   |t| |x - y| up to   max error
///   16        10                  1e-13
///   32        30                  1e-12
///   64        80                  1e-12
DecomposedKernel exp_kernel(double t, std::size_t r_nodes = 32);

/// Complex measure mu on the line: point masses, or a density discretized by
/// composite Gauss-Legendre on [-half_width, half_width] split at 0.
class FourierMeasure {
public:
    using Node = std::pair<double, Complex>;  // (t, weight)

    static FourierMeasure atoms(std::vector<Node> atoms);
    /// `tail_abs_moment` bounds int_{|t| > half_width} (1 + |t|) |density| dt; it is recorded, not computed.
    static FourierMeasure density(std::function<double(double)> density, double half_width, std::size_t panels,
                                  std::size_t nodes_per_panel, double tail_abs_moment);

    [[nodiscard]] bool is_atomic() const noexcept { return !density_; }
    /// Quadrature-discretized nodes; for densities, `panels` overrides the default panel count.
    [[nodiscard]] std::vector<Node> nodes(std::optional<std::size_t> panels = std::nullopt) const;
    [[nodiscard]] const std::vector<Node>& default_nodes() const noexcept { return cached_; }
    /// int |t| d|mu|(t), by the same discretization.
    [[nodiscard]] double abs_first_moment() const;
    [[nodiscard]] double tail_bound() const noexcept { return tail_; }

private:
    std::vector<Node> atoms_;
    std::function<double(double)> density_;
    double half_width_ = 0.0;
    std::size_t panels_ = 0;
    std::size_t nodes_per_panel_ = 0;
    double tail_ = 0.0;
    std::vector<Node> cached_;
};

/// f and f' as plain callables, for any C^1 f.
struct DifferentiableFunction {
    ScalarFunction value;
    ScalarFunction derivative;
    std::string label;
};

DifferentiableFunction function_exp();
DifferentiableFunction function_sin();
DifferentiableFunction function_square();
DifferentiableFunction function_identity();
/// 1/(1 + x^2)
DifferentiableFunction function_lorentzian();
/// e^{itx}
DifferentiableFunction function_exp_i(double t);

class WienerFunction {
public:
    /// When a closed form is given it must agree with the measure within 1e-8
    /// on a test grid over [-4, 4]; otherwise InvalidInput.
    WienerFunction(FourierMeasure measure, std::optional<DifferentiableFunction> closed_form = std::nullopt,
                   std::string label = "wiener");

    [[nodiscard]] const FourierMeasure& measure() const noexcept { return measure_; }
    [[nodiscard]] const std::optional<DifferentiableFunction>& closed_form() const noexcept { return closed_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    /// f and f' evaluated through the measure.
    [[nodiscard]] DifferentiableFunction as_function() const;

private:
    FourierMeasure measure_;
    std::optional<DifferentiableFunction> closed_;
    std::string label_;
};

/// f(x) = int e^{itx} dmu(t)
Complex wiener_eval(const WienerFunction& f, double x);
/// f'(x) = int it e^{itx} dmu(t)
Complex wiener_deriv(const WienerFunction& f, double x);

WienerFunction wiener_exp_i(double a);
/// cos(ax): atoms at +-a with weight 1/2.
WienerFunction wiener_cos(double a);
/// sin(ax): atoms at +-a with weights -+i/2.
WienerFunction wiener_sin(double a);
/// 1/(1 + x^2) from the density e^{-|t|}/2, truncated where the tail is below 1e-10.
WienerFunction wiener_lorentzian(std::size_t panels = 48, std::size_t nodes_per_panel = 16);

/// (f(x) - f(y))/(x - y) off the diagonal band |x - y| <= diag_tol max(1, |x|, |y|),
/// f'((x + y)/2) inside it.
Kernel divided_difference_kernel(const DifferentiableFunction& f, double diag_tol = 1e-7, double radius = 4.0);

/// Z = (t, r) grid: dnu = |t| d|mu|(t) dr, phase of i t mu({t}) folded into alpha.
/// `t_panels` re-discretizes a density measure.
DecomposedKernel divided_difference_decomposed(const WienerFunction& f, std::size_t r_nodes = 32,
                                               std::optional<std::size_t> t_panels = std::nullopt);

}  // namespace doiflow
