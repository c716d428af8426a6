// doiflow <doi|dk|flow|weightfn|verify> --config <path> [--workers N] [--output <path>]
//
// Exit codes: 0 success, 1 check failure, 2 config error, 3 numerical failure.
// DOIFLOW_SEED overrides the config seed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "doiflow/config.hpp"
#include "doiflow/parallel.hpp"
#include "doiflow/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw doiflow::ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t parse_seed(const char* text) {
    const std::string s(text);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw doiflow::ConfigError("DOIFLOW_SEED", "expected an unsigned 64-bit integer");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw doiflow::ConfigError("DOIFLOW_SEED", "out of range");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"doiflow: double operator integrals and spectral flow"};
    std::string command;
    std::string config_path;
    std::size_t workers = doiflow::default_workers();
    std::string output;
    app.add_option("command", command, "doi, dk, flow, weightfn or verify")->required();
    app.add_option("--config", config_path, "scenario JSON")->required();
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--output", output, "report path (overrides the config)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : doiflow::exit_config_error;
    }

    try {
        const doiflow::Command cli_command = doiflow::parse_command(command);
        doiflow::ScenarioConfig cfg = doiflow::parse_config(read_file(config_path));
        if (cfg.command_given && cfg.command != cli_command)
            throw doiflow::ConfigError("command", "config says '" + std::string(doiflow::to_string(cfg.command)) +
                                                      "' but the command line says '" + command + "'");
        cfg.command = cli_command;
        if (const char* env = std::getenv("DOIFLOW_SEED")) cfg.seed = parse_seed(env);
        if (!output.empty()) cfg.output = output;

        const doiflow::RunOutcome outcome = doiflow::run(cfg, workers);
        if (cfg.output) {
            std::ofstream out(*cfg.output, std::ios::binary);
            if (!out) {
                std::cerr << "doiflow: cannot write '" << *cfg.output << "'\n";
                return doiflow::exit_numerical_failure;
            }
            out << outcome.report;
        } else {
            std::cout << outcome.report;
        }
        if (outcome.exit_code != doiflow::exit_success)
            std::cerr << "doiflow: " << command << " finished with exit code " << outcome.exit_code << "\n";
        return outcome.exit_code;
    } catch (const doiflow::ConfigError& e) {
        std::cerr << "doiflow: " << e.what() << "\n";
        return doiflow::exit_config_error;
    } catch (const doiflow::Error& e) {
        std::cerr << "doiflow: " << e.what() << "\n";
        return doiflow::exit_numerical_failure;
    }
}
