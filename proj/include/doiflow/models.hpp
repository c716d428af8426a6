#pragma once

// Built-in gapped paths: each comes with its interval family I(s) and gamma.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "doiflow/perturbation.hpp"
#include "doiflow/spectral_flow.hpp"

namespace doiflow {

struct Model {
    std::string name;
    OperatorPath path;
    IntervalFamily interval;
    double gamma = 0.0;
};

/// H(s) = sigma_z + kappa s sigma_x, I(s) = [lambda_-(s) - 1/4, lambda_-(s)], gamma = 2.
Model two_level_model(double kappa = 1.0, Interval domain = {0.0, 1.0});

/// H0 = W diag(d) W^dagger with dim/2 values of d uniform in [-g/2 - 1, -g/2] and
/// the rest in [g/2, g/2 + 1]; Phi(s) = s eps V with ||V||_op = 1.
/// I(s) = [-3g/4 - 1, -g/4], gamma = g/2. Needs eps max|s| <= g/4.
Model random_gapped_model(std::size_t dim, double gap, double epsilon, std::uint64_t seed,
                          Interval domain = {0.0, 1.0});

/// Open chain H(s) = -sum Z_i Z_{i+1} - s sum X_i on `sites` spins. The patch is
/// the lowest doublet; gamma is 0.9 times the smallest E2 - E1 over a 33-point sweep.
Model tfim_model(std::size_t sites, Interval domain = {0.0, 0.5});

/// E_0 <= E_1 <= E_2 of the open TFIM chain from its free-fermion modes.
std::vector<double> tfim_low_energies(std::size_t sites, double s);

struct ModelValidation {
    std::size_t samples = 0;
    double min_interval_distance = 0.0;
    double min_spectral_gap = 0.0;
    std::size_t rank = 0;
};

/// detect_patch at `samples` evenly spaced s in the domain; errors propagate.
ModelValidation validate_model(const Model& model, std::size_t samples = 33);

}  // namespace doiflow
