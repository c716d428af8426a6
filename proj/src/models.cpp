#include "doiflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "doiflow/rng.hpp"

namespace doiflow {

Model two_level_model(double kappa, Interval domain) {
    if (!std::isfinite(kappa)) throw InvalidInput("two_level: kappa must be finite");
    const HermitianMatrix sz(ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}});
    const HermitianMatrix sx(ComplexMatrix{{0.0, kappa}, {kappa, 0.0}});
    auto interval = [kappa](double s) {
        const double lower = -std::sqrt(1.0 + kappa * kappa * s * s);
        return Interval{lower - 0.25, lower};
    };
    return Model{"two_level", linear_path(sz, sx, domain), interval, 2.0};
}

Model random_gapped_model(std::size_t dim, double gap, double epsilon, std::uint64_t seed, Interval domain) {
    if (dim < 2) throw InvalidInput("random_gapped: dim must be >= 2");
    if (!(gap > 0.0)) throw InvalidInput("random_gapped: gap must be positive");
    if (!(epsilon >= 0.0)) throw InvalidInput("random_gapped: epsilon must be nonnegative");
    const double reach = std::max(std::abs(domain.lo), std::abs(domain.hi));
    if (epsilon * reach > 0.25 * gap * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "random_gapped: eps * max|s| = " << epsilon * reach << " exceeds gap/4 = " << 0.25 * gap;
        throw InvalidInput(os.str());
    }
    CounterRng rng(seed);
    CounterRng diag_rng = rng.substream(1);
    CounterRng unitary_rng = rng.substream(2);
    CounterRng pert_rng = rng.substream(3);

    std::vector<double> d(dim);
    const std::size_t lower = dim / 2;
    for (std::size_t i = 0; i < dim; ++i)
        d[i] = i < lower ? diag_rng.uniform(-0.5 * gap - 1.0, -0.5 * gap) : diag_rng.uniform(0.5 * gap, 0.5 * gap + 1.0);
    const ComplexMatrix w = random_unitary(unitary_rng, dim);
    const HermitianMatrix h0(w * ComplexMatrix::diagonal(std::span<const double>(d)) * w.adjoint());

    const HermitianMatrix g = random_hermitian(pert_rng, dim);
    const double scale = epsilon / op_norm(g.matrix());
    const HermitianMatrix v(scale * g.matrix());

    auto interval = [gap](double) { return Interval{-0.75 * gap - 1.0, -0.25 * gap}; };
    return Model{"random_gapped", linear_path(h0, v, domain), interval, 0.5 * gap};
}

std::vector<double> tfim_low_energies(std::size_t sites, double s) {
    // Open-chain modes: 2 x singular values of the bidiagonal matrix with s on
    // the diagonal and 1 above it.
    ComplexMatrix b(sites, sites);
    for (std::size_t i = 0; i < sites; ++i) {
        b(i, i) = s;
        if (i + 1 < sites) b(i, i + 1) = 1.0;
    }
    std::vector<double> sv = singular_values(b);
    std::sort(sv.begin(), sv.end());
    double e0 = 0.0;
    for (double x : sv) e0 -= x;
    return {e0, e0 + 2.0 * sv[0], e0 + 2.0 * sv[1]};
}

Model tfim_model(std::size_t sites, Interval domain) {
    if (sites < 2 || sites > 8) throw InvalidInput("tfim: sites must be in [2, 8]");
    const std::size_t dim = std::size_t{1} << sites;
    ComplexMatrix zz(dim, dim);
    ComplexMatrix x(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
        double e = 0.0;
        for (std::size_t i = 0; i + 1 < sites; ++i) {
            const double zi = ((b >> i) & 1U) ? -1.0 : 1.0;
            const double zj = ((b >> (i + 1)) & 1U) ? -1.0 : 1.0;
            e -= zi * zj;
        }
        zz(b, b) = e;
        for (std::size_t i = 0; i < sites; ++i) x(b ^ (std::size_t{1} << i), b) -= 1.0;
    }

    // gamma from the E2 - E1 gap over the sweep, with a 0.9 safety factor.
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 33; ++k) {
        const double s = domain.lo + domain.length() * static_cast<double>(k) / 32.0;
        const auto e = tfim_low_energies(sites, s);
        min_gap = std::min(min_gap, e[2] - e[1]);
    }
    auto interval = [sites](double s) {
        const auto e = tfim_low_energies(sites, s);
        return Interval{e[0] - 0.25, e[1] + 0.05 * (e[2] - e[1])};
    };
    return Model{"tfim", linear_path(HermitianMatrix(zz), HermitianMatrix(x), domain), interval, 0.9 * min_gap};
}

ModelValidation validate_model(const Model& model, std::size_t samples) {
    if (samples < 2) throw InvalidInput("validate_model needs at least 2 samples");
    ModelValidation out;
    out.samples = samples;
    out.min_interval_distance = std::numeric_limits<double>::infinity();
    out.min_spectral_gap = std::numeric_limits<double>::infinity();
    const Interval& dom = model.path.domain();
    std::optional<EigenDecomposition> prev;
    for (std::size_t k = 0; k < samples; ++k) {
        const double s = dom.lo + dom.length() * static_cast<double>(k) / static_cast<double>(samples - 1);
        const HermitianMatrix h = model.path.hamiltonian(s);
        EigenDecomposition eig = prev ? hermitian_eig(h, prev->eigenvectors) : hermitian_eig(h);
        const SpectralPatch patch = detect_patch(eig, model.interval(s), model.gamma);
        if (k == 0) out.rank = patch.rank;
        if (patch.rank != out.rank) {
            std::ostringstream os;
            os << model.name << ": patch rank changes from " << out.rank << " to " << patch.rank << " at s = " << s;
            throw PatchError(os.str());
        }
        out.min_interval_distance = std::min(out.min_interval_distance, patch.interval_distance);
        out.min_spectral_gap = std::min(out.min_spectral_gap, patch.spectral_gap);
        prev = std::move(eig);
    }
    return out;
}

}  // namespace doiflow
