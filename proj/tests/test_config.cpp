#include <gtest/gtest.h>

#include <string>

#include "doiflow/config.hpp"
#include "doiflow/runner.hpp"

using namespace doiflow;

namespace {

std::string config_error_field(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<none>";
}

}  // namespace

TEST(ParseConfig, MinimalFlowDefaults) {
    const ScenarioConfig c = parse_config(R"({"command": "flow", "model": {"name": "two_level"}})");
    EXPECT_EQ(c.command, Command::flow);
    EXPECT_TRUE(c.command_given);
    EXPECT_EQ(c.s_grid.steps, 1000u);
    EXPECT_EQ(c.s_grid.start, 0.0);
    EXPECT_EQ(c.s_grid.end, 1.0);
    EXPECT_EQ(c.quadrature.contour_nodes, 64u);
    EXPECT_EQ(c.model.kappa, 1.0);
    EXPECT_FALSE(c.gamma.has_value());
    EXPECT_FALSE(c.output.has_value());
}

TEST(ParseConfig, TfimDefaultsToHalfDomain) {
    const ScenarioConfig c = parse_config(R"({"model": {"name": "tfim", "params": {"sites": 4}}})");
    EXPECT_EQ(c.s_grid.end, 0.5);
    EXPECT_EQ(c.model.sites, 4u);
    EXPECT_FALSE(c.command_given);
}

TEST(ParseConfig, FieldErrors) {
    EXPECT_EQ(config_error_field(R"({"s_grid": {"steps": 0}})"), "steps");
    EXPECT_EQ(config_error_field(R"({"model": {"name": "heisenberg"}})"), "model.name");
    EXPECT_EQ(config_error_field(R"({"colour": 1})"), "colour");
    EXPECT_EQ(config_error_field(R"({"model": {"name": "two_level", "params": {"dim": 4}}})"), "model.params.dim");
    EXPECT_EQ(config_error_field(R"({"quadrature": {"contour_nodes": 1}})"), "quadrature.contour_nodes");
    EXPECT_EQ(config_error_field(R"({"weight_fn": {"fourier_nodes": 0}})"), "weight_fn.fourier_nodes");
    EXPECT_EQ(config_error_field(R"({"s_grid": {"start": 1, "end": 0}})"), "s_grid");
    EXPECT_EQ(config_error_field(R"({"gamma": -1})"), "gamma");
    EXPECT_EQ(config_error_field(R"({"seed": -4})"), "seed");
    EXPECT_EQ(config_error_field(R"({"command": "plot"})"), "command");
    EXPECT_EQ(config_error_field(R"({"model": {"name": "tfim", "params": {"sites": 9}}})"), "model.params.sites");
    EXPECT_EQ(config_error_field(R"({"model": {"name": "random_gapped", "params": {"gap": 1, "epsilon": 0.5}}})"),
              "model.params.epsilon");
}

TEST(ParseConfig, SyntaxErrorNamesLine) {
    EXPECT_EQ(config_error_field("{\n  \"seed\": 1,\n  \"gamma\": ,\n}"), "line 3");
    EXPECT_EQ(config_error_field("[1, 2]"), "line 1");
}

TEST(ParseConfig, EchoRoundTrips) {
    const ScenarioConfig c = parse_config(
        R"({"command": "dk", "model": {"name": "random_gapped", "params": {"dim": 6, "gap": 3, "epsilon": 0.5}},
            "gamma": 1.25, "s_grid": {"start": -1, "end": 1, "steps": 7}, "seed": 18446744073709551615,
            "output": "dk.csv"})");
    const ScenarioConfig again = parse_config(config_to_json(c));
    EXPECT_EQ(config_to_json(again), config_to_json(c));
    EXPECT_EQ(again.seed, 18446744073709551615ULL);
    EXPECT_EQ(*again.gamma, 1.25);
}

TEST(BuildGrid, EndpointsExact) {
    const auto g = build_grid({0.0, 0.3, 7});
    ASSERT_EQ(g.size(), 8u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 0.3);
}

TEST(Runner, WeightTableNormalization) {
    const ScenarioConfig c = parse_config(R"({"command": "weightfn", "gamma": 2})");
    const RunOutcome out = run(c, 1);
    EXPECT_EQ(out.exit_code, exit_success);
    const auto pos = out.report.find("\nnormalization,0,");
    ASSERT_NE(pos, std::string::npos);
    const double value = std::stod(out.report.substr(pos + 17));
    EXPECT_NEAR(value, 1.0, 1e-8);
    EXPECT_EQ(out.report.rfind("# doiflow weightfn config=", 0), 0u);
}

TEST(Runner, FlowCsvHeaderAndRows) {
    const ScenarioConfig c = parse_config(R"({"command": "flow", "s_grid": {"steps": 40}})");
    const RunOutcome out = run(c, 1);
    EXPECT_EQ(out.exit_code, exit_success);
    EXPECT_NE(out.report.find("\ns,gap,min_dist_to_contour,commutator_residual,transport_error,unitarity_defect\n"),
              std::string::npos);
    std::size_t rows = 0;
    for (std::size_t p = out.report.find("\n0"); p != std::string::npos; p = out.report.find("\n", p + 1))
        if (p + 1 < out.report.size() && out.report[p + 1] != '#' && out.report[p + 1] != 's') ++rows;
    EXPECT_EQ(rows, 41u);
}

TEST(Runner, OutputIndependentOfWorkers) {
    const ScenarioConfig c = parse_config(
        R"({"command": "doi", "model": {"name": "random_gapped", "params": {"dim": 6}}, "s_grid": {"steps": 6}})");
    const RunOutcome one = run(c, 1);
    const RunOutcome four = run(c, 4);
    EXPECT_EQ(one.exit_code, exit_success);
    EXPECT_EQ(one.report, four.report);
}

TEST(Runner, NumericalFailureIsRecorded) {
    // gamma larger than the true gap: model validation fails with a GapError.
    const ScenarioConfig c = parse_config(R"({"command": "flow", "gamma": 5, "s_grid": {"steps": 4}})");
    const RunOutcome out = run(c, 1);
    EXPECT_EQ(out.exit_code, exit_numerical_failure);
    EXPECT_NE(out.report.find("# error code="), std::string::npos);
}
