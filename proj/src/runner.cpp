#include "doiflow/runner.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include "doiflow/acceptance.hpp"
#include "doiflow/doi.hpp"
#include "doiflow/kernels.hpp"
#include "doiflow/parallel.hpp"
#include "doiflow/perturbation.hpp"
#include "doiflow/pvm.hpp"
#include "doiflow/spectral_flow.hpp"

namespace doiflow {

namespace {

// Shortest round-trip representation keeps CSV bodies byte-stable.
std::string num(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string error_line(const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return "# error code=" + std::string(to_string(e.code())) + " message=" + msg + "\n";
}

std::string header(const ScenarioConfig& cfg) {
    return "# doiflow " + std::string(to_string(cfg.command)) + " config=" + config_to_json(cfg) + "\n";
}

WeightFunctionOptions weight_options(const ScenarioConfig& cfg) {
    WeightFunctionOptions o;
    o.fourier_nodes = cfg.weight_fn.fourier_nodes;
    o.t_max_factor = cfg.weight_fn.t_max_factor;
    return o;
}

struct Row {
    std::string text;
    bool ok = true;
    std::optional<std::string> error;
};

int finish(std::ostringstream& out, const std::vector<Row>& rows) {
    int code = exit_success;
    for (const Row& r : rows) {
        out << r.text;
        if (r.error) code = exit_numerical_failure;
        else if (!r.ok && code == exit_success) code = exit_check_failure;
    }
    return code;
}

const std::array<DifferentiableFunction, 3>& test_functions() {
    static const std::array<DifferentiableFunction, 3> fs{function_exp(), function_sin(), function_lorentzian()};
    return fs;
}

// f(H(s)) - f(H(start)) through the DOI, with a decomposed-kernel oracle for
// the Wiener-class functions at small dimension.
int run_doi(const ScenarioConfig& cfg, std::size_t workers, std::ostringstream& out) {
    const Model model = build_model(cfg);
    const std::vector<double> grid = build_grid(cfg.s_grid);
    const auto& fs = test_functions();
    const std::array<std::optional<WienerFunction>, 3> wiener{std::nullopt, wiener_sin(1.0), wiener_lorentzian()};
    const HermitianMatrix a = model.path.hamiltonian(grid.front());
    const bool oracle = a.dim() <= 16;

    std::vector<Row> rows(grid.size() * fs.size());
    parallel_for(rows.size(), workers, [&](std::size_t idx) {
        const double s = grid[idx / fs.size()];
        const std::size_t fi = idx % fs.size();
        Row& row = rows[idx];
        try {
            const HermitianMatrix phi(model.path.hamiltonian(s).matrix() - a.matrix());
            const FDifference d = f_difference(a, phi, fs[fi]);
            std::string oracle_text;
            if (oracle && wiener[fi]) {
                const HermitianMatrix b = a + phi;
                const ComplexMatrix dec = doi_apply_decomposed(divided_difference_decomposed(*wiener[fi]),
                                                               pvm_from_hermitian(a), pvm_from_hermitian(b),
                                                               phi.matrix());
                const double res = op_norm(dec - d.direct);
                oracle_text = num(res);
                row.ok = res <= d.tolerance;
            }
            row.ok = row.ok && d.ok();
            row.text = num(s) + "," + fs[fi].label + "," + num(d.residual) + "," + num(d.tolerance) + "," +
                       oracle_text + "," + (row.ok ? "ok" : "fail") + "\n";
        } catch (const Error& e) {
            row.error = std::string(to_string(e.code()));
            row.text = num(s) + "," + fs[fi].label + ",,,," + *row.error + "\n";
        }
    });
    out << "s,function,residual,tolerance,oracle_residual,status\n";
    return finish(out, rows);
}

// Daletskii-Krein derivative against central differences at h = 1e-4.
int run_dk(const ScenarioConfig& cfg, std::size_t workers, std::ostringstream& out) {
    const Model model = build_model(cfg);
    const std::vector<double> grid = build_grid(cfg.s_grid);
    const auto& fs = test_functions();
    constexpr double kStep = 1e-4;
    constexpr double kTolerance = 1e-5;
    std::vector<Row> rows(grid.size() * fs.size());
    parallel_for(rows.size(), workers, [&](std::size_t idx) {
        const double s = grid[idx / fs.size()];
        const DifferentiableFunction& f = fs[idx % fs.size()];
        Row& row = rows[idx];
        try {
            const ComplexMatrix dk = dk_derivative(model.path, s, f);
            const double dk_norm = op_norm(dk);
            if (!model.path.domain().contains(s - kStep) || !model.path.domain().contains(s + kStep)) {
                row.text = num(s) + "," + f.label + "," + num(dk_norm) + ",,skipped\n";
                return;
            }
            const double dev = op_norm(fd_derivative(model.path, s, f, kStep) - dk) / std::max(dk_norm, 1e-300);
            row.ok = dev <= kTolerance;
            row.text = num(s) + "," + f.label + "," + num(dk_norm) + "," + num(dev) + "," + (row.ok ? "ok" : "fail") +
                       "\n";
        } catch (const Error& e) {
            row.error = std::string(to_string(e.code()));
            row.text = num(s) + "," + f.label + ",,," + *row.error + "\n";
        }
    });
    out << "s,function,dk_norm,fd_relative_deviation,status\n";
    return finish(out, rows);
}

int run_flow(const ScenarioConfig& cfg, std::ostringstream& out) {
    const Model model = build_model(cfg);
    validate_model(model);
    const WeightFunction wf(model.gamma, weight_options(cfg));
    const std::vector<double> grid = build_grid(cfg.s_grid);
    FlowOptions options;
    options.contour_nodes = cfg.quadrature.contour_nodes;
    const FlowResult result = flow_integrate(model.path, model.interval, wf, grid, options);

    out << "s,gap,min_dist_to_contour,commutator_residual,transport_error,unitarity_defect\n";
    int code = exit_success;
    for (const FlowStep& st : result.diagnostics) {
        out << num(st.s) << ',' << num(st.gap) << ',' << num(st.min_dist_to_contour) << ','
            << num(st.commutator_residual) << ',' << num(st.transport_error) << ',' << num(st.unitarity_defect)
            << '\n';
        const double tol = 1e-5 * (1.0 + op_norm(model.path.phi_prime(st.s).matrix()));
        if (st.commutator_residual > tol || st.unitarity_defect > 1e-8) code = exit_check_failure;
    }
    if (result.failure) {
        out << "# error code=" << to_string(ErrorCode::gap_error) << " message=" << *result.failure << "\n";
        return exit_numerical_failure;
    }
    const EquivalenceReport rep = verify_automorphic_equivalence(result);
    out << "# summary max_transport_error=" << num(rep.max_error) << " mean_transport_error=" << num(rep.mean_error)
        << " max_conserved_error=" << num(rep.max_conserved_error)
        << " max_unitarity_defect=" << num(rep.max_unitarity_defect) << "\n";
    return code;
}

int run_weightfn(const ScenarioConfig& cfg, std::ostringstream& out) {
    const double gamma = cfg.gamma.value_or(build_model(cfg).gamma);
    const WeightFunction wf(gamma, weight_options(cfg));
    out << "kind,x,value\n";
    constexpr std::size_t kTPoints = 2000;
    for (std::size_t k = 0; k <= kTPoints; ++k) {
        const double t = wf.t_max() * static_cast<double>(k) / kTPoints;
        out << "w," << num(t) << ',' << num(wf(t)) << '\n';
    }
    constexpr std::size_t kXiPoints = 400;
    for (std::size_t k = 0; k <= kXiPoints; ++k) {
        const double xi = -2.0 * gamma + 4.0 * gamma * static_cast<double>(k) / kXiPoints;
        out << "profile_reconstructed," << num(xi) << ',' << num(wf.reconstruct_profile(xi)) << '\n';
    }
    out << "normalization,0," << num(wf.integral()) << '\n';
    out << "first_moment,0," << num(wf.first_moment()) << '\n';
    return std::abs(wf.integral() - 1.0) <= 1e-8 ? exit_success : exit_check_failure;
}

int run_verify(const ScenarioConfig& cfg, std::size_t workers, std::ostringstream& out) {
    AcceptanceOptions options;
    options.seed = cfg.seed;
    options.workers = workers;
    const auto results = run_acceptance(options);
    out << acceptance_json(results, config_to_json(cfg));
    bool failed = false;
    bool errored = false;
    for (const auto& r : results) {
        failed = failed || r.status() == "fail";
        errored = errored || r.status() == "error";
    }
    if (failed) return exit_check_failure;
    return errored ? exit_numerical_failure : exit_success;
}

}  // namespace

RunOutcome run(const ScenarioConfig& cfg, std::size_t workers) {
    RunOutcome outcome;
    std::ostringstream out;
    if (cfg.command != Command::verify) out << header(cfg);
    try {
        switch (cfg.command) {
            case Command::doi: outcome.exit_code = run_doi(cfg, workers, out); break;
            case Command::dk: outcome.exit_code = run_dk(cfg, workers, out); break;
            case Command::flow: outcome.exit_code = run_flow(cfg, out); break;
            case Command::weightfn: outcome.exit_code = run_weightfn(cfg, out); break;
            case Command::verify: outcome.exit_code = run_verify(cfg, workers, out); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        out << error_line(e);
        outcome.exit_code = exit_numerical_failure;
    }
    outcome.report = out.str();
    return outcome;
}

}  // namespace doiflow
