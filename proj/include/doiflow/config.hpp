#pragma once

// Scenario configuration: one JSON object, strictly parsed.
//
//   {
//     "command": "flow",
//     "model": {"name": "two_level", "params": {"kappa": 1.0}},
//     "gamma": 2.0,
//     "s_grid": {"start": 0.0, "end": 1.0, "steps": 1000},
//     "weight_fn": {"fourier_nodes": 200, "t_max_factor": 400},
//     "quadrature": {"t_nodes": 8, "u_nodes": 8, "contour_nodes": 64},
//     "seed": 20240611,
//     "output": "flow.csv"
//   }
//
// Every key is optional; unknown keys are rejected with the dotted field name.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "doiflow/models.hpp"

namespace doiflow {

enum class Command { doi, dk, flow, weightfn, verify };

std::string_view to_string(Command command);
/// ConfigError("command") for an unknown name.
Command parse_command(std::string_view name);

struct ModelConfig {
    std::string name = "two_level";
    double kappa = 1.0;         // two_level
    std::size_t dim = 8;        // random_gapped
    double gap = 2.0;           // random_gapped
    double epsilon = 0.25;      // random_gapped
    std::size_t sites = 6;      // tfim
};

struct GridConfig {
    double start = 0.0;
    double end = 1.0;  // 0.5 for tfim unless given
    std::size_t steps = 1000;
};

struct WeightConfig {
    std::size_t fourier_nodes = 200;
    double t_max_factor = 400.0;
};

/// t_nodes and u_nodes are Gauss-Legendre nodes per panel of the generator
/// quadrature; contour_nodes is the trapezoid size on the circle.
struct QuadratureConfig {
    std::size_t t_nodes = 8;
    std::size_t u_nodes = 8;
    std::size_t contour_nodes = 64;
};

struct ScenarioConfig {
    Command command = Command::verify;
    bool command_given = false;  // whether the JSON named a command
    ModelConfig model;
    std::optional<double> gamma;  // model default when absent
    GridConfig s_grid;
    WeightConfig weight_fn;
    QuadratureConfig quadrature;
    std::uint64_t seed = 20240611;
    std::optional<std::string> output;
};

/// Syntax errors raise ConfigError("line N"); semantic ones name the field.
ScenarioConfig parse_config(std::string_view text);

/// Compact JSON of the effective configuration (keys sorted).
std::string config_to_json(const ScenarioConfig& config);

/// The model with its domain set to [start, end].
Model build_model(const ScenarioConfig& config);

/// start + k (end - start)/steps, k = 0..steps.
std::vector<double> build_grid(const GridConfig& grid);

}  // namespace doiflow
