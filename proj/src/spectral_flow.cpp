#include "doiflow/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace doiflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kSampleNodesPerPanel = 16;
constexpr double kSamplePanelWidth = 0.25;  // in units of 1/gamma

double bump_exponent(double xi, double gamma, double sharpness) {
    const double x = xi / gamma;
    return -sharpness * x * x / (1.0 - x * x);
}

// Composite Gauss-Legendre on [a, b] with panels no wider than `width`.
Quadrature panel_rule(double a, double b, double width, std::size_t nodes_per_panel) {
    const auto panels = static_cast<std::size_t>(std::ceil((b - a) / width - 1e-9));
    return composite_gauss_legendre(a, b, std::max<std::size_t>(panels, 1), nodes_per_panel);
}

}  // namespace

// ---------------------------------------------------------------- weight function

WeightFunction::WeightFunction(double gamma, const WeightFunctionOptions& options)
    : gamma_(gamma), options_(options), t_max_(0.0) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("weight function: gamma must be positive");
    if (!(options.profile_sharpness > 0.0)) throw InvalidInput("weight function: profile sharpness must be positive");
    if (options.fourier_nodes < 2) throw InvalidInput("weight function: fourier_nodes must be >= 2");
    if (!(options.t_max_factor > 0.0)) throw InvalidInput("weight function: t_max_factor must be positive");
    t_max_ = options.t_max_factor / gamma;

    fourier_rule_ = gauss_legendre(options.fourier_nodes, 0.0, gamma);
    for (std::size_t k = 0; k < fourier_rule_.size(); ++k) fourier_rule_.weights[k] *= profile(fourier_rule_.nodes[k]) / kPi;

    // Positive half, mirrored: w is even by construction.
    const double width = kSamplePanelWidth / gamma;
    const Quadrature half = panel_rule(0.0, t_max_, width, kSampleNodesPerPanel);
    const std::size_t m = half.size();
    samples_.nodes.resize(2 * m);
    samples_.weights.resize(2 * m);
    values_.resize(2 * m);
    for (std::size_t k = 0; k < m; ++k) {
        const double v = (*this)(half.nodes[k]);
        samples_.nodes[m + k] = half.nodes[k];
        samples_.weights[m + k] = half.weights[k];
        values_[m + k] = v;
        samples_.nodes[m - 1 - k] = -half.nodes[k];
        samples_.weights[m - 1 - k] = half.weights[k];
        values_[m - 1 - k] = v;
    }
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        const double wv = samples_.weights[k] * values_[k];
        integral_ += wv;
        first_moment_ += wv * samples_.nodes[k];
        abs_first_moment_ += std::abs(wv * samples_.nodes[k]);
    }

    const Quadrature tail = panel_rule(t_max_, 1.25 * t_max_, width, kSampleNodesPerPanel);
    for (std::size_t k = 0; k < tail.size(); ++k)
        tail_abs_moment_ += 2.0 * tail.weights[k] * std::abs(tail.nodes[k] * (*this)(tail.nodes[k]));
    if (tail_abs_moment_ > 1e-6 * abs_first_moment_) {
        std::ostringstream os;
        os << "weight function tail: int_{|t|>t_max} |t w(t)| dt = " << tail_abs_moment_ << " exceeds 1e-6 of "
           << abs_first_moment_ << " (gamma = " << gamma << ", t_max_factor = " << options.t_max_factor
           << "); increase t_max_factor";
        throw TruncationError(os.str());
    }
}

double WeightFunction::profile(double xi) const {
    if (std::abs(xi) >= gamma_) return 0.0;
    return std::exp(bump_exponent(xi, gamma_, options_.profile_sharpness));
}

double WeightFunction::profile_minus_one(double xi) const {
    if (std::abs(xi) >= gamma_) return -1.0;
    return std::expm1(bump_exponent(xi, gamma_, options_.profile_sharpness));
}

double WeightFunction::operator()(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < fourier_rule_.size(); ++k) s += fourier_rule_.weights[k] * std::cos(fourier_rule_.nodes[k] * t);
    return s;
}

double WeightFunction::reconstruct_profile(double xi) const {
    double s = 0.0;
    for (std::size_t k = 0; k < samples_.size(); ++k)
        s += samples_.weights[k] * values_[k] * std::cos(xi * samples_.nodes[k]);
    return s;
}

WeightFunction build_weight_function(double gamma, const WeightFunctionOptions& options) {
    return WeightFunction(gamma, options);
}

// ---------------------------------------------------------------- patches and contours

SpectralPatch detect_patch(const FinitePVM& pvm, Interval interval, double gamma) {
    if (!(interval.lo <= interval.hi)) throw InvalidInput("detect_patch: interval must satisfy lo <= hi");
    if (!(gamma > 0.0)) throw InvalidInput("detect_patch: gamma must be positive");
    SpectralPatch patch;
    patch.interval = interval;
    patch.gamma = gamma;
    // Endpoints sitting on an eigenvalue count as inside despite rounding.
    const double slack = 1e-12 * std::max({1.0, std::abs(interval.lo), std::abs(interval.hi)});
    for (std::size_t i = 0; i < pvm.size(); ++i) {
        const double x = pvm.location(i);
        (x >= interval.lo - slack && x <= interval.hi + slack ? patch.inside : patch.outside).push_back(i);
    }
    if (patch.inside.empty()) {
        std::ostringstream os;
        os << "no spectrum in [" << interval.lo << ", " << interval.hi << "]";
        throw PatchError(os.str());
    }
    if (patch.outside.empty()) {
        std::ostringstream os;
        os << "all of the spectrum lies in [" << interval.lo << ", " << interval.hi << "]";
        throw PatchError(os.str());
    }
    patch.interval_distance = std::numeric_limits<double>::infinity();
    patch.spectral_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j : patch.outside) {
        const double x = pvm.location(j);
        const double d = x < interval.lo ? interval.lo - x : x - interval.hi;
        patch.interval_distance = std::min(patch.interval_distance, d);
        for (std::size_t i : patch.inside)
            patch.spectral_gap = std::min(patch.spectral_gap, std::abs(x - pvm.location(i)));
    }
    if (patch.interval_distance < gamma * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "interval [" << interval.lo << ", " << interval.hi << "] is at distance " << patch.interval_distance
           << " from the rest of the spectrum, below gamma = " << gamma;
        throw GapError(os.str());
    }
    patch.projector = pvm.projector(patch.inside);
    for (std::size_t i : patch.inside) patch.rank += pvm.rank(i);
    return patch;
}

SpectralPatch detect_patch(const EigenDecomposition& eig, Interval interval, double gamma) {
    return detect_patch(pvm_from_eigen(eig), interval, gamma);
}

double Contour::theta(std::size_t k) const { return 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_nodes); }

Complex Contour::point(std::size_t k) const { return center + 0.5 * diameter * std::polar(1.0, theta(k)); }

Complex Contour::weighted_derivative(std::size_t k) const {
    return kI * 0.5 * diameter * std::polar(1.0, theta(k)) * (2.0 * kPi / static_cast<double>(n_nodes));
}

double Contour::min_node_distance(std::span<const double> points) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_nodes; ++k)
        for (double x : points) d = std::min(d, std::abs(point(k) - x));
    return d;
}

Contour contour_for_patch(const Interval& interval, double gamma, std::size_t n_nodes) {
    if (n_nodes < 2) throw InvalidInput("contour needs at least 2 nodes");
    return Contour{0.5 * (interval.lo + interval.hi), interval.length() + gamma, n_nodes};
}

void validate_contour(const Contour& contour, std::span<const double> points, double min_distance) {
    const double d = contour.min_node_distance(points);
    if (d < min_distance) {
        std::ostringstream os;
        os << "contour node at distance " << d << " from the spectrum, below the required " << min_distance;
        throw ContourError(os.str());
    }
}

ComplexMatrix riesz_projection(const HermitianMatrix& h, const Contour& contour, double min_margin,
                               ResolventMethod method) {
    const std::size_t n = h.dim();
    std::optional<EigenDecomposition> eig;
    if (min_margin > 0.0 || method == ResolventMethod::spectral) eig = hermitian_eig(h);
    if (min_margin > 0.0) validate_contour(contour, eig->eigenvalues, min_margin);

    const Complex scale = -1.0 / (2.0 * kPi * kI);
    if (method == ResolventMethod::spectral) {
        ComplexMatrix scaled = eig->eigenvectors;
        for (std::size_t c = 0; c < n; ++c) {
            Complex f = 0.0;
            for (std::size_t k = 0; k < contour.n_nodes; ++k)
                f += scale * contour.weighted_derivative(k) / (eig->eigenvalues[c] - contour.point(k));
            for (std::size_t r = 0; r < n; ++r) scaled(r, c) *= f;
        }
        return scaled * eig->eigenvectors.adjoint();
    }

    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < contour.n_nodes; ++k) {
        ComplexMatrix shifted = h.matrix();
        const Complex z = contour.point(k);
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= z;
        ComplexMatrix r;
        try {
            r = inverse(shifted);
        } catch (const InvalidInput&) {
            std::ostringstream os;
            os << "resolvent is singular at contour node " << z;
            throw ContourError(os.str());
        }
        out.add_scaled(scale * contour.weighted_derivative(k), r);
    }
    return out;
}

// ---------------------------------------------------------------- Hastings generator

Complex hastings_spectral_weight(const WeightFunction& wf, double omega) {
    if (omega == 0.0) return 0.0;
    return -kI * wf.profile_minus_one(omega) / omega;
}

Kernel hastings_kernel(const WeightFunction& wf) {
    // Only the profile matters; keep the sample arrays out of the closure.
    const double gamma = wf.gamma();
    const double sharpness = wf.options().profile_sharpness;
    return Kernel(
        [gamma, sharpness](double x, double y) -> Complex {
            const double omega = x - y;
            if (omega == 0.0) return 0.0;
            const double m1 = std::abs(omega) >= gamma ? -1.0 : std::expm1(bump_exponent(omega, gamma, sharpness));
            return -kI * m1 / omega;
        },
        "hastings");
}

namespace {

ComplexMatrix generator_by_quadrature(const EigenDecomposition& eig, const ComplexMatrix& phi_prime,
                                      const WeightFunction& wf, const GeneratorQuadrature& q) {
    if (q.t_nodes < 2 || q.u_nodes < 2) throw InvalidInput("generator quadrature needs at least 2 nodes per panel");
    if (!(q.max_panel_phase > 0.0)) throw InvalidInput("generator quadrature: max_panel_phase must be positive");
    const std::size_t n = eig.dim();
    const auto& lambda = eig.eigenvalues;
    const double omega_max = lambda.back() - lambda.front();
    const double t_max = wf.t_max();
    const auto panels =
        static_cast<std::size_t>(std::ceil(t_max * std::max(wf.gamma(), omega_max) / q.max_panel_phase));
    const double h = t_max / static_cast<double>(panels);
    const Quadrature tq = gauss_legendre(q.t_nodes, 0.0, 1.0);
    const Quadrature uq = gauss_legendre(q.u_nodes, 0.0, 1.0);

    // Declared accuracy check: the nested scalar integral at omega_max and at
    // omega_max / 2 against (e^{i t omega} - 1)/(i omega), node by node.
    for (double omega : {omega_max, 0.5 * omega_max}) {
        if (omega == 0.0) continue;
        for (double dir : {1.0, -1.0}) {
            Complex cum = 0.0;
            for (std::size_t p = 0; p < panels; ++p) {
                const double a = h * static_cast<double>(p);
                for (std::size_t m = 0; m < tq.size(); ++m) {
                    const double len = h * tq.nodes[m];
                    Complex partial = 0.0;
                    for (std::size_t l = 0; l < uq.size(); ++l)
                        partial += len * uq.weights[l] * std::exp(kI * (dir * (a + len * uq.nodes[l]) * omega));
                    const double t = dir * (a + len);
                    const Complex approx = dir * (cum + partial);
                    const Complex exact = (std::exp(kI * (t * omega)) - 1.0) / (kI * omega);
                    if (std::abs(approx - exact) > 1e-9 * (1.0 + std::abs(t))) {
                        std::ostringstream os;
                        os << "generator quadrature inaccurate: inner integral error " << std::abs(approx - exact)
                           << " at t = " << t << ", omega = " << omega << " (" << q.t_nodes << "/" << q.u_nodes
                           << " nodes per panel, panel phase " << h * std::max(wf.gamma(), omega_max) << ")";
                        throw QuadratureError(os.str());
                    }
                }
                for (std::size_t l = 0; l < uq.size(); ++l)
                    cum += h * uq.weights[l] * std::exp(kI * (dir * (a + h * uq.nodes[l]) * omega));
            }
        }
    }

    // K_ij = int w(t) int_0^t e^{iu(lambda_i - lambda_j)} du dt, with the
    // inner integral carried panel by panel.
    ComplexMatrix k(n, n);
    ComplexMatrix cum(n, n);
    ComplexVector e(n);
    double mass = 0.0;
    // target += coef e(u) e(u)^dagger with e_i(u) = e^{i u lambda_i}
    auto add_rank_one = [&](ComplexMatrix& target, Complex coef, double u) {
        for (std::size_t i = 0; i < n; ++i) e[i] = std::polar(1.0, u * lambda[i]);
        for (std::size_t i = 0; i < n; ++i) {
            const Complex ci = coef * e[i];
            Complex* row = &target(i, 0);
            for (std::size_t j = 0; j < n; ++j) row[j] += ci * std::conj(e[j]);
        }
    };
    for (double dir : {1.0, -1.0}) {
        cum = ComplexMatrix(n, n);
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = h * static_cast<double>(p);
            double panel_w = 0.0;
            for (std::size_t m = 0; m < tq.size(); ++m) {
                const double len = h * tq.nodes[m];
                const double t = dir * (a + len);
                const double wt = h * tq.weights[m] * wf(t);
                panel_w += wt;
                for (std::size_t l = 0; l < uq.size(); ++l)
                    add_rank_one(k, dir * wt * len * uq.weights[l], dir * (a + len * uq.nodes[l]));
            }
            mass += panel_w;
            k.add_scaled(dir * panel_w, cum);
            for (std::size_t l = 0; l < uq.size(); ++l) add_rank_one(cum, h * uq.weights[l], dir * (a + h * uq.nodes[l]));
        }
    }
    if (std::abs(mass - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "generator quadrature: int w dt = " << mass << " on the t-grid";
        throw QuadratureError(os.str());
    }

    const ComplexMatrix& v = eig.eigenvectors;
    ComplexMatrix inner = v.adjoint() * phi_prime * v;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inner(i, j) *= k(i, j);
    return v * inner * v.adjoint();
}

}  // namespace

HermitianMatrix hastings_generator(const EigenDecomposition& eig, const ComplexMatrix& phi_prime,
                                   const WeightFunction& wf, GeneratorMethod method,
                                   const GeneratorQuadrature& quadrature) {
    if (phi_prime.rows() != eig.dim() || phi_prime.cols() != eig.dim())
        throw ShapeError("hastings_generator: Phi' does not match H(s)");
    ComplexMatrix d;
    if (method == GeneratorMethod::closed_form) {
        const FinitePVM e = pvm_from_eigen(eig);
        d = doi_apply(hastings_kernel(wf), e, e, phi_prime);
    } else {
        d = generator_by_quadrature(eig, phi_prime, wf, quadrature);
    }
    return HermitianMatrix(d, 1e-9);
}

HermitianMatrix hastings_generator(const OperatorPath& path, double s, const WeightFunction& wf,
                                   GeneratorMethod method, const GeneratorQuadrature& quadrature) {
    path.require(s);
    return hastings_generator(hermitian_eig(path.hamiltonian(s)), path.phi_prime(s).matrix(), wf, method,
                              quadrature);
}

// ---------------------------------------------------------------- commutator identity

namespace {

// c_ij = (1/2 pi i) sum_k Gamma'_k dtheta / ((lambda_i - z_k)(lambda_j - z_k))
ComplexMatrix contour_coefficients(std::span<const double> lambda, const Contour& contour) {
    const std::size_t n = lambda.size();
    const Complex scale = 1.0 / (2.0 * kPi * kI);
    std::vector<ComplexVector> inv(contour.n_nodes, ComplexVector(n));
    std::vector<Complex> dz(contour.n_nodes);
    for (std::size_t k = 0; k < contour.n_nodes; ++k) {
        const Complex z = contour.point(k);
        dz[k] = scale * contour.weighted_derivative(k);
        for (std::size_t i = 0; i < n; ++i) inv[k][i] = 1.0 / (lambda[i] - z);
    }
    ComplexMatrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < contour.n_nodes; ++k) s += dz[k] * inv[k][i] * inv[k][j];
            c(i, j) = c(j, i) = s;
        }
    return c;
}

}  // namespace

ComplexMatrix contour_projection_derivative(const EigenDecomposition& eig, const ComplexMatrix& phi_prime,
                                            const Contour& contour) {
    const ComplexMatrix c = contour_coefficients(eig.eigenvalues, contour);
    const ComplexMatrix& v = eig.eigenvectors;
    ComplexMatrix inner = v.adjoint() * phi_prime * v;
    for (std::size_t i = 0; i < eig.dim(); ++i)
        for (std::size_t j = 0; j < eig.dim(); ++j) inner(i, j) *= c(i, j);
    return v * inner * v.adjoint();
}

double hermitian_op_norm(const ComplexMatrix& m) {
    if (!m.square()) throw ShapeError("hermitian_op_norm needs a square matrix");
    if (m.empty()) return 0.0;
    const double scale = m.max_abs();
    if (scale == 0.0) return 0.0;
    if (max_abs_diff(m, m.adjoint()) > 1e-8 * scale) return op_norm(m);
    const auto eig = hermitian_eig(HermitianMatrix(m, 1e-8));
    return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

CommutatorCheck commutator_identity_check(const OperatorPath& path, double s, const WeightFunction& wf,
                                          const IntervalFamily& interval, const CommutatorOptions& options) {
    path.require(s);
    const HermitianMatrix h = path.hamiltonian(s);
    const auto eig = hermitian_eig(h);
    const Interval in = interval(s);
    CommutatorCheck out;
    out.patch = detect_patch(eig, in, wf.gamma());
    const Contour contour = contour_for_patch(in, wf.gamma(), options.contour_nodes);
    validate_contour(contour, eig.eigenvalues, wf.gamma() / 3.0);

    const ComplexMatrix phi_prime = path.phi_prime(s).matrix();
    const ComplexMatrix p_prime = contour_projection_derivative(eig, phi_prime, contour);
    const ComplexMatrix d = hastings_generator(eig, phi_prime, wf).matrix();
    const ComplexMatrix& p = out.patch.projector;
    const ComplexMatrix comm = kI * commutator(d, p);

    out.residual = hermitian_op_norm(p_prime - comm);
    out.tolerance = 1e-6 * (1.0 + hermitian_op_norm(phi_prime));
    out.p_prime_norm = hermitian_op_norm(p_prime);
    out.commutator_norm = hermitian_op_norm(comm);

    const double step = options.fd_step;
    if (options.fd_check && path.domain().contains(s - 2.0 * step) && path.domain().contains(s + 2.0 * step)) {
        const ResolventMethod method = path.dim() <= 64 ? ResolventMethod::linear_solve : ResolventMethod::spectral;
        auto proj = [&](double x) { return riesz_projection(path.hamiltonian(x), contour, 0.0, method); };
        ComplexMatrix fd = proj(s - 2.0 * step);
        fd.add_scaled(-8.0, proj(s - step));
        fd.add_scaled(8.0, proj(s + step));
        fd.add_scaled(-1.0, proj(s + 2.0 * step));
        fd *= 1.0 / (12.0 * step);
        out.fd_residual = op_norm(p_prime - fd);
    }
    return out;
}

// ---------------------------------------------------------------- flow

namespace {

std::vector<std::size_t> inside_columns(const FinitePVM& pvm, const SpectralPatch& patch) {
    std::vector<std::size_t> cols;
    for (std::size_t i : patch.inside)
        for (std::size_t c = pvm.offsets()[i]; c < pvm.offsets()[i + 1]; ++c) cols.push_back(c);
    return cols;
}

ComplexMatrix select_columns(const ComplexMatrix& m, const std::vector<std::size_t>& cols) {
    ComplexMatrix out(m.rows(), cols.size());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(r, cols[c]);
    return out;
}

// ||X X^dagger - Y Y^dagger||_op for orthonormal X, Y of equal width, as the
// largest singular value of (1 - X X^dagger) Y.
double projection_distance(const ComplexMatrix& x, const ComplexMatrix& y) {
    ComplexMatrix m = y - x * (x.adjoint() * y);
    return op_norm(m);
}

// Residual of P' = i[D, P] in the eigenbasis, both sides Schur products with Phi'.
double eigenbasis_commutator_residual(const EigenDecomposition& eig, const ComplexMatrix& phi_prime_eig,
                                      const std::vector<std::size_t>& inside, const Contour& contour,
                                      const WeightFunction& wf) {
    const std::size_t n = eig.dim();
    const ComplexMatrix c = contour_coefficients(eig.eigenvalues, contour);
    std::vector<double> p(n, 0.0);
    for (std::size_t i : inside) p[i] = 1.0;
    ComplexMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Complex w = hastings_spectral_weight(wf, eig.eigenvalues[i] - eig.eigenvalues[j]);
            r(i, j) = phi_prime_eig(i, j) * (c(i, j) - kI * w * (p[j] - p[i]));
        }
    return hermitian_op_norm(r);
}

}  // namespace

FlowResult flow_integrate(const OperatorPath& path, const IntervalFamily& interval, const WeightFunction& wf,
                          std::span<const double> s_grid, const FlowOptions& options) {
    if (s_grid.empty()) throw InvalidInput("flow needs a nonempty s-grid");
    for (std::size_t k = 1; k < s_grid.size(); ++k)
        if (!(s_grid[k] > s_grid[k - 1])) throw InvalidInput("flow s-grid must be strictly increasing");
    path.require(s_grid.front());
    path.require(s_grid.back());
    const std::size_t keep = std::max<std::size_t>(options.keep_every, 1);
    const std::size_t n = path.dim();
    const double gamma = wf.gamma();

    FlowResult result;
    result.s_grid.assign(s_grid.begin(), s_grid.end());

    ComplexMatrix u = ComplexMatrix::identity(n);
    EigenDecomposition eig = hermitian_eig(path.hamiltonian(s_grid.front()));
    FinitePVM pvm = pvm_from_eigen(eig);
    SpectralPatch patch = detect_patch(pvm, interval(s_grid.front()), gamma);
    const std::size_t rank0 = patch.rank;
    const ComplexMatrix x0 = select_columns(pvm.basis(), inside_columns(pvm, patch));
    std::optional<ComplexMatrix> d_basis;

    auto record = [&](std::size_t k) {
        const double s = s_grid[k];
        const Interval in = interval(s);
        const Contour contour = contour_for_patch(in, gamma, options.contour_nodes);
        FlowStep step;
        step.s = s;
        step.gap = patch.spectral_gap;
        step.min_dist_to_contour = contour.min_node_distance(eig.eigenvalues);
        const std::vector<std::size_t> cols = inside_columns(pvm, patch);
        const ComplexMatrix& v = eig.eigenvectors;
        const ComplexMatrix phi_eig = v.adjoint() * path.phi_prime(s).matrix() * v;
        step.commutator_residual = eigenbasis_commutator_residual(eig, phi_eig, cols, contour, wf);
        if (patch.rank == rank0) {
            step.transport_error = projection_distance(select_columns(pvm.basis(), cols), u * x0);
        } else {
            step.transport_error = 1.0;
        }
        ComplexMatrix defect = u.adjoint() * u;
        for (std::size_t i = 0; i < n; ++i) defect(i, i) -= 1.0;
        step.unitarity_defect = hermitian_op_norm(defect);
        result.diagnostics.push_back(step);
        result.stored_index.push_back(k);
        result.unitaries.push_back(u);
        result.patches.push_back(patch);
    };

    record(0);
    for (std::size_t k = 0; k + 1 < s_grid.size(); ++k) {
        const double h = s_grid[k + 1] - s_grid[k];
        const double mid = s_grid[k] + 0.5 * h;
        const EigenDecomposition eig_mid = hermitian_eig(path.hamiltonian(mid), eig.eigenvectors);
        const HermitianMatrix d = hastings_generator(eig_mid, path.phi_prime(mid).matrix(), wf);
        const EigenDecomposition eig_d = d_basis ? hermitian_eig(d, *d_basis) : hermitian_eig(d);
        d_basis = eig_d.eigenvectors;
        u = matrix_exp_i(eig_d, h) * u;

        const double s = s_grid[k + 1];
        eig = hermitian_eig(path.hamiltonian(s), eig_mid.eigenvectors);
        pvm = pvm_from_eigen(eig);
        try {
            patch = detect_patch(pvm, interval(s), gamma);
        } catch (const GapError& err) {
            result.failure = "GapError at s = " + std::to_string(s) + ": " + err.what();
            return result;
        } catch (const PatchError& err) {
            result.failure = "PatchError at s = " + std::to_string(s) + ": " + err.what();
            return result;
        }
        if ((k + 1) % keep == 0 || k + 2 == s_grid.size()) record(k + 1);
    }
    return result;
}

EquivalenceReport verify_automorphic_equivalence(const FlowResult& result) {
    EquivalenceReport report;
    if (result.unitaries.empty()) return report;
    const ComplexMatrix& p0 = result.patches.front().projector;
    const std::size_t rank0 = result.patches.front().rank;
    double sum = 0.0;
    for (std::size_t k = 0; k < result.unitaries.size(); ++k) {
        const ComplexMatrix& u = result.unitaries[k];
        const ComplexMatrix& p = result.patches[k].projector;
        const double err = hermitian_op_norm(u * p0 * u.adjoint() - p);
        report.errors.push_back(err);
        report.max_error = std::max(report.max_error, err);
        sum += err;
        report.max_conserved_error =
            std::max(report.max_conserved_error, hermitian_op_norm(u.adjoint() * p * u - p0));
        const auto trace_rank = static_cast<long>(std::lround(p.trace().real()));
        if (trace_rank != static_cast<long>(rank0)) report.rank_constant = false;
    }
    for (const auto& step : result.diagnostics)
        report.max_unitarity_defect = std::max(report.max_unitarity_defect, step.unitarity_defect);
    report.mean_error = sum / static_cast<double>(result.unitaries.size());
    return report;
}

}  // namespace doiflow
