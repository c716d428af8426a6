// Runs every acceptance criterion and prints one pass/fail line each.
// Usage: doiflow_acceptance [--seed N] [--workers N] [--only 1,2,...] [--json path]

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "doiflow/acceptance.hpp"
#include "doiflow/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"doiflow acceptance suite"};
    doiflow::AcceptanceOptions options;
    options.workers = doiflow::default_workers();
    std::string only;
    std::string json_path;
    app.add_option("--seed", options.seed, "suite seed");
    app.add_option("--workers", options.workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--only", only, "comma-separated criterion ids");
    app.add_option("--json", json_path, "write the JSON report here");
    CLI11_PARSE(app, argc, argv);

    std::stringstream ss(only);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) options.only.push_back(std::stoi(item));

    auto last = std::chrono::steady_clock::now();
    options.on_result = [&last](const doiflow::CriterionResult& r) {
        const auto now = std::chrono::steady_clock::now();
        const double secs = std::chrono::duration<double>(now - last).count();
        last = now;
        std::printf("%s (%.1fs)\n", doiflow::acceptance_line(r).c_str(), secs);
        std::fflush(stdout);
    };
    const auto results = doiflow::run_acceptance(options);

    bool ok = true;
    for (const auto& r : results) ok = ok && r.pass();
    if (!json_path.empty()) std::ofstream(json_path) << doiflow::acceptance_json(results);
    std::printf("%s: %zu criteria\n", ok ? "ALL PASS" : "FAILURES", results.size());
    return ok ? 0 : 1;
}
