#include "doiflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "doiflow/quadrature.hpp"

namespace doiflow {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Complex checked_value(const ScalarFunction& f, double x, const std::string& label, const char* what) {
    const Complex v = f(x);
    if (!finite(v)) {
        std::ostringstream os;
        os << label << ": " << what << " is not finite at " << x;
        throw DomainError(os.str());
    }
    return v;
}

}  // namespace

Kernel::Kernel(KernelFunction eval, std::string label, double radius)
    : eval_(std::move(eval)), label_(std::move(label)) {
    constexpr int kGrid = 32;
    for (int i = 0; i < kGrid; ++i) {
        const double x = -radius + 2.0 * radius * i / (kGrid - 1);
        for (int j = 0; j < kGrid; ++j) {
            const double y = -radius + 2.0 * radius * j / (kGrid - 1);
            if (!finite(eval_(x, y))) {
                std::ostringstream os;
                os << "kernel '" << label_ << "' is not finite at (" << x << ", " << y << ")";
                throw DomainError(os.str());
            }
        }
    }
}

Kernel kernel_const_one() {
    return Kernel([](double, double) { return Complex(1.0); }, "one");
}

Kernel kernel_left(ScalarFunction alpha, std::string label) {
    return Kernel([alpha = std::move(alpha)](double x, double) { return alpha(x); }, std::move(label));
}

Kernel kernel_right(ScalarFunction beta, std::string label) {
    return Kernel([beta = std::move(beta)](double, double y) { return beta(y); }, std::move(label));
}

Kernel kernel_product(const Kernel& a, const Kernel& b) {
    return Kernel([fa = a.function(), fb = b.function()](double x, double y) { return fa(x, y) * fb(x, y); },
                  "(" + a.label() + ")*(" + b.label() + ")");
}

Kernel kernel_sum(const Kernel& a, const Kernel& b) {
    return Kernel([fa = a.function(), fb = b.function()](double x, double y) { return fa(x, y) + fb(x, y); },
                  "(" + a.label() + ")+(" + b.label() + ")");
}

Kernel kernel_scale(Complex c, const Kernel& a) {
    return Kernel([c, fa = a.function()](double x, double y) { return c * fa(x, y); }, "c*(" + a.label() + ")");
}

Complex DecomposedKernel::operator()(double x, double y) const {
    Complex s{};
    for (std::size_t z = 0; z < weights.size(); ++z) s += weights[z] * alpha[z](x) * beta[z](y);
    return s;
}

Kernel DecomposedKernel::induced(double radius) const {
    return Kernel([k = *this](double x, double y) { return k(x, y); }, label, radius);
}

void DecomposedKernel::validate() const {
    if (alpha.size() != weights.size() || beta.size() != weights.size())
        throw InvalidInput("decomposition lists have different lengths");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("decomposition weights must be positive and finite");
}

DecomposedKernel decomposed_zero() {
    DecomposedKernel k;
    k.label = "zero";
    return k;
}

DecomposedKernel decomposed_const_one() {
    return decomposed_separated([](double) { return Complex(1.0); }, [](double) { return Complex(1.0); }, 1.0, "one");
}

DecomposedKernel decomposed_separated(ScalarFunction alpha, ScalarFunction beta, Complex scale, std::string label) {
    DecomposedKernel k;
    k.label = std::move(label);
    const double mag = std::abs(scale);
    if (mag == 0.0) return k;
    const Complex phase = scale / mag;
    k.weights.push_back(mag);
    k.alpha.push_back([alpha = std::move(alpha), phase](double x) { return phase * alpha(x); });
    k.beta.push_back(std::move(beta));
    return k;
}

DecomposedKernel decomposed_sum(const DecomposedKernel& k1, const DecomposedKernel& k2) {
    DecomposedKernel k = k1;
    k.label = "(" + k1.label + ")+(" + k2.label + ")";
    k.weights.insert(k.weights.end(), k2.weights.begin(), k2.weights.end());
    k.alpha.insert(k.alpha.end(), k2.alpha.begin(), k2.alpha.end());
    k.beta.insert(k.beta.end(), k2.beta.begin(), k2.beta.end());
    return k;
}

DecomposedKernel decomposed_product(const DecomposedKernel& k1, const DecomposedKernel& k2) {
    DecomposedKernel k;
    k.label = "(" + k1.label + ")*(" + k2.label + ")";
    k.weights.reserve(k1.size() * k2.size());
    for (std::size_t a = 0; a < k1.size(); ++a) {
        for (std::size_t b = 0; b < k2.size(); ++b) {
            k.weights.push_back(k1.weights[a] * k2.weights[b]);
            k.alpha.push_back([f = k1.alpha[a], g = k2.alpha[b]](double x) { return f(x) * g(x); });
            k.beta.push_back([f = k1.beta[a], g = k2.beta[b]](double y) { return f(y) * g(y); });
        }
    }
    return k;
}

DecomposedKernel decomposed_conjugate(const DecomposedKernel& k) {
    DecomposedKernel c = k;
    c.label = "conj(" + k.label + ")";
    for (auto& f : c.alpha) f = [g = f](double x) { return std::conj(g(x)); };
    for (auto& f : c.beta) f = [g = f](double y) { return std::conj(g(y)); };
    return c;
}

double mnorm_upper_bound(const DecomposedKernel& k, const FinitePVM& e, const FinitePVM& f) {
    if (e.size() == 0 || f.size() == 0) throw InvalidInput("mnorm_upper_bound needs nonempty atom lists");
    double bound = 0.0;
    for (std::size_t z = 0; z < k.size(); ++z) {
        double amax = 0.0;
        for (double x : e.locations()) amax = std::max(amax, std::abs(k.alpha[z](x)));
        double bmax = 0.0;
        for (double y : f.locations()) bmax = std::max(bmax, std::abs(k.beta[z](y)));
        bound += k.weights[z] * amax * bmax;
    }
    return bound;
}

DecomposedKernel exp_kernel(double t, std::size_t r_nodes) {
    if (r_nodes < 2) throw InvalidInput("exp_kernel needs at least 2 r-nodes");
    DecomposedKernel k;
    k.label = "phi_t";
    if (t == 0.0) return k;
    const Quadrature rule = gauss_legendre(r_nodes, 0.0, 1.0);
    const Complex phase = t > 0.0 ? kI : -kI;
    for (std::size_t z = 0; z < rule.size(); ++z) {
        const double r = rule.nodes[z];
        k.weights.push_back(std::abs(t) * rule.weights[z]);
        k.alpha.push_back([=](double x) { return phase * std::exp(kI * (t * x * r)); });
        k.beta.push_back([=](double y) { return std::exp(kI * (t * y * (1.0 - r))); });
    }
    return k;
}

FourierMeasure FourierMeasure::atoms(std::vector<Node> atoms) {
    FourierMeasure m;
    for (const auto& [t, w] : atoms)
        if (!std::isfinite(t) || !finite(w)) throw InvalidInput("Fourier measure atom is not finite");
    m.atoms_ = std::move(atoms);
    m.cached_ = m.atoms_;
    return m;
}

FourierMeasure FourierMeasure::density(std::function<double(double)> density, double half_width, std::size_t panels,
                                       std::size_t nodes_per_panel, double tail_abs_moment) {
    if (panels < 2 || panels % 2 != 0) throw InvalidInput("density discretization needs an even panel count");
    FourierMeasure m;
    m.density_ = std::move(density);
    m.half_width_ = half_width;
    m.panels_ = panels;
    m.nodes_per_panel_ = nodes_per_panel;
    m.tail_ = tail_abs_moment;
    m.cached_ = m.nodes(panels);
    return m;
}

std::vector<FourierMeasure::Node> FourierMeasure::nodes(std::optional<std::size_t> panels) const {
    if (!density_) return atoms_;
    const std::size_t p = panels.value_or(panels_);
    if (p == panels_ && !cached_.empty()) return cached_;
    if (p < 2 || p % 2 != 0) throw InvalidInput("density discretization needs an even panel count");
    std::vector<Node> out;
    for (const auto& [a, b] : {std::pair{-half_width_, 0.0}, std::pair{0.0, half_width_}}) {
        const Quadrature q = composite_gauss_legendre(a, b, p / 2, nodes_per_panel_);
        for (std::size_t k = 0; k < q.size(); ++k) out.emplace_back(q.nodes[k], q.weights[k] * density_(q.nodes[k]));
    }
    return out;
}

double FourierMeasure::abs_first_moment() const {
    double s = 0.0;
    for (const auto& [t, w] : cached_) s += std::abs(t) * std::abs(w);
    return s;
}

DifferentiableFunction function_exp() {
    return {[](double x) { return Complex(std::exp(x)); }, [](double x) { return Complex(std::exp(x)); }, "exp"};
}

DifferentiableFunction function_sin() {
    return {[](double x) { return Complex(std::sin(x)); }, [](double x) { return Complex(std::cos(x)); }, "sin"};
}

DifferentiableFunction function_square() {
    return {[](double x) { return Complex(x * x); }, [](double x) { return Complex(2.0 * x); }, "square"};
}

DifferentiableFunction function_identity() {
    return {[](double x) { return Complex(x); }, [](double) { return Complex(1.0); }, "identity"};
}

DifferentiableFunction function_lorentzian() {
    return {[](double x) { return Complex(1.0 / (1.0 + x * x)); },
            [](double x) { return Complex(-2.0 * x / ((1.0 + x * x) * (1.0 + x * x))); }, "lorentzian"};
}

DifferentiableFunction function_exp_i(double t) {
    return {[t](double x) { return std::exp(kI * (t * x)); }, [t](double x) { return kI * t * std::exp(kI * (t * x)); },
            "exp_i"};
}

Complex wiener_eval(const WienerFunction& f, double x) {
    Complex s{};
    for (const auto& [t, w] : f.measure().default_nodes()) s += w * std::exp(kI * (t * x));
    return s;
}

Complex wiener_deriv(const WienerFunction& f, double x) {
    Complex s{};
    for (const auto& [t, w] : f.measure().default_nodes()) s += w * kI * t * std::exp(kI * (t * x));
    return s;
}

WienerFunction::WienerFunction(FourierMeasure measure, std::optional<DifferentiableFunction> closed_form,
                               std::string label)
    : measure_(std::move(measure)), closed_(std::move(closed_form)), label_(std::move(label)) {
    if (!closed_) return;
    for (int k = 0; k <= 32; ++k) {
        const double x = -4.0 + 0.25 * k;
        const double dv = std::abs(wiener_eval(*this, x) - closed_->value(x));
        const double dd = std::abs(wiener_deriv(*this, x) - closed_->derivative(x));
        if (dv > 1e-8 || dd > 1e-8) {
            std::ostringstream os;
            os << label_ << ": measure and closed form disagree at x = " << x << " (" << std::max(dv, dd) << ")";
            throw InvalidInput(os.str());
        }
    }
}

DifferentiableFunction WienerFunction::as_function() const {
    auto self = std::make_shared<WienerFunction>(*this);
    return {[self](double x) { return wiener_eval(*self, x); }, [self](double x) { return wiener_deriv(*self, x); },
            label_};
}

WienerFunction wiener_exp_i(double a) {
    return WienerFunction(FourierMeasure::atoms({{a, 1.0}}), function_exp_i(a), "exp_i");
}

WienerFunction wiener_cos(double a) {
    DifferentiableFunction closed{[a](double x) { return Complex(std::cos(a * x)); },
                                  [a](double x) { return Complex(-a * std::sin(a * x)); }, "cos"};
    return WienerFunction(FourierMeasure::atoms({{-a, 0.5}, {a, 0.5}}), closed, "cos");
}

WienerFunction wiener_sin(double a) {
    DifferentiableFunction closed{[a](double x) { return Complex(std::sin(a * x)); },
                                  [a](double x) { return Complex(a * std::cos(a * x)); }, "sin"};
    return WienerFunction(FourierMeasure::atoms({{-a, 0.5 * kI}, {a, -0.5 * kI}}), closed, "sin");
}

WienerFunction wiener_lorentzian(std::size_t panels, std::size_t nodes_per_panel) {
    // Tail beyond T: int_{|t|>T} (1 + |t|) e^{-|t|}/2 dt = (2 + T) e^{-T}.
    constexpr double kHalfWidth = 24.0;
    const double tail = (2.0 + kHalfWidth) * std::exp(-kHalfWidth);
    auto measure = FourierMeasure::density([](double t) { return 0.5 * std::exp(-std::abs(t)); }, kHalfWidth, panels,
                                           nodes_per_panel, tail);
    return WienerFunction(std::move(measure), function_lorentzian(), "lorentzian");
}

Kernel divided_difference_kernel(const DifferentiableFunction& f, double diag_tol, double radius) {
    if (!(diag_tol > 0.0)) throw InvalidInput("diag_tol must be positive");
    auto eval = [f, diag_tol](double x, double y) -> Complex {
        const double scale = std::max({1.0, std::abs(x), std::abs(y)});
        if (std::abs(x - y) > diag_tol * scale) {
            const Complex fx = checked_value(f.value, x, f.label, "f");
            const Complex fy = checked_value(f.value, y, f.label, "f");
            return (fx - fy) / (x - y);
        }
        return checked_value(f.derivative, 0.5 * (x + y), f.label, "f'");
    };
    return Kernel(eval, "divided_difference(" + f.label + ")", radius);
}

DecomposedKernel divided_difference_decomposed(const WienerFunction& f, std::size_t r_nodes,
                                               std::optional<std::size_t> t_panels) {
    if (r_nodes < 2) throw InvalidInput("divided_difference_decomposed needs at least 2 r-nodes");
    DecomposedKernel k;
    k.label = "phi_f(" + f.label() + ")";
    const Quadrature rule = gauss_legendre(r_nodes, 0.0, 1.0);
    for (const auto& [t, mu] : f.measure().nodes(t_panels)) {
        const Complex c = kI * t * mu;
        const double mag = std::abs(c);
        if (mag == 0.0) continue;
        const Complex phase = c / mag;
        for (std::size_t z = 0; z < rule.size(); ++z) {
            const double r = rule.nodes[z];
            k.weights.push_back(mag * rule.weights[z]);
            k.alpha.push_back([=](double x) { return phase * std::exp(kI * (t * x * r)); });
            k.beta.push_back([=](double y) { return std::exp(kI * (t * y * (1.0 - r))); });
        }
    }
    return k;
}

}  // namespace doiflow
