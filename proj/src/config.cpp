#include "doiflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

#include "json.hpp"

namespace doiflow {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(prefix + key, "unknown key");
    }
}

const json& require_object(const json& v, const std::string& field) {
    if (!v.is_object()) throw ConfigError(field, "expected an object");
    return v;
}

double get_real(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
    return x;
}

std::size_t get_count(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    const auto x = v.get<std::int64_t>();
    if (x < 0) throw ConfigError(field, "must be nonnegative");
    return static_cast<std::size_t>(x);
}

std::size_t get_node_count(const json& v, const std::string& field) {
    const std::size_t n = get_count(v, field);
    if (n < 2) throw ConfigError(field, "node counts must be >= 2");
    return n;
}

void parse_model(const json& m, ScenarioConfig& cfg) {
    require_object(m, "model");
    reject_unknown(m, "model.", {"name", "params"});
    if (m.contains("name")) {
        if (!m["name"].is_string()) throw ConfigError("model.name", "expected a string");
        cfg.model.name = m["name"].get<std::string>();
    }
    const std::string& name = cfg.model.name;
    if (name != "two_level" && name != "random_gapped" && name != "tfim")
        throw ConfigError("model.name", "unknown model '" + name + "' (two_level, random_gapped, tfim)");
    if (!m.contains("params")) return;
    const json& p = require_object(m["params"], "model.params");
    if (name == "two_level") {
        reject_unknown(p, "model.params.", {"kappa"});
        if (p.contains("kappa")) cfg.model.kappa = get_real(p["kappa"], "model.params.kappa");
    } else if (name == "random_gapped") {
        reject_unknown(p, "model.params.", {"dim", "gap", "epsilon"});
        if (p.contains("dim")) cfg.model.dim = get_count(p["dim"], "model.params.dim");
        if (p.contains("gap")) cfg.model.gap = get_real(p["gap"], "model.params.gap");
        if (p.contains("epsilon")) cfg.model.epsilon = get_real(p["epsilon"], "model.params.epsilon");
    } else {
        reject_unknown(p, "model.params.", {"sites"});
        if (p.contains("sites")) cfg.model.sites = get_count(p["sites"], "model.params.sites");
    }
}

void validate(const ScenarioConfig& cfg) {
    const auto& g = cfg.s_grid;
    if (g.steps < 1) throw ConfigError("steps", "s_grid.steps must be >= 1");
    if (!(g.start < g.end)) throw ConfigError("s_grid", "start must be below end");
    if (cfg.gamma && !(*cfg.gamma > 0.0)) throw ConfigError("gamma", "must be positive");
    if (!(cfg.weight_fn.t_max_factor > 0.0)) throw ConfigError("weight_fn.t_max_factor", "must be positive");
    const auto& m = cfg.model;
    if (m.name == "random_gapped") {
        if (m.dim < 2) throw ConfigError("model.params.dim", "must be >= 2");
        if (!(m.gap > 0.0)) throw ConfigError("model.params.gap", "must be positive");
        if (!(m.epsilon >= 0.0)) throw ConfigError("model.params.epsilon", "must be nonnegative");
        const double reach = std::max(std::abs(g.start), std::abs(g.end));
        if (m.epsilon * reach > 0.25 * m.gap * (1.0 + 1e-12))
            throw ConfigError("model.params.epsilon", "epsilon * max|s| must not exceed gap/4");
    }
    if (m.name == "tfim" && (m.sites < 2 || m.sites > 8))
        throw ConfigError("model.params.sites", "must be in [2, 8]");
}

}  // namespace

std::string_view to_string(Command command) {
    switch (command) {
        case Command::doi: return "doi";
        case Command::dk: return "dk";
        case Command::flow: return "flow";
        case Command::weightfn: return "weightfn";
        case Command::verify: return "verify";
    }
    return "?";
}

Command parse_command(std::string_view name) {
    for (Command c : {Command::doi, Command::dk, Command::flow, Command::weightfn, Command::verify})
        if (to_string(c) == name) return c;
    throw ConfigError("command", "unknown command '" + std::string(name) + "' (doi, dk, flow, weightfn, verify)");
}

ScenarioConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& err) {
        const std::size_t upto = std::min<std::size_t>(err.byte == 0 ? 0 : err.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ConfigError("line " + std::to_string(line), "JSON syntax error");
    }
    if (!root.is_object()) throw ConfigError("line 1", "config must be a JSON object");
    reject_unknown(root, "", {"command", "model", "gamma", "s_grid", "weight_fn", "quadrature", "seed", "output"});

    ScenarioConfig cfg;
    if (root.contains("command")) {
        if (!root["command"].is_string()) throw ConfigError("command", "expected a string");
        cfg.command = parse_command(root["command"].get<std::string>());
        cfg.command_given = true;
    }
    if (root.contains("model")) parse_model(root["model"], cfg);
    if (cfg.model.name == "tfim") cfg.s_grid.end = 0.5;
    if (root.contains("gamma")) cfg.gamma = get_real(root["gamma"], "gamma");
    if (root.contains("s_grid")) {
        const json& g = require_object(root["s_grid"], "s_grid");
        reject_unknown(g, "s_grid.", {"start", "end", "steps"});
        if (g.contains("start")) cfg.s_grid.start = get_real(g["start"], "s_grid.start");
        if (g.contains("end")) cfg.s_grid.end = get_real(g["end"], "s_grid.end");
        if (g.contains("steps")) {
            cfg.s_grid.steps = get_count(g["steps"], "steps");
        }
    }
    if (root.contains("weight_fn")) {
        const json& w = require_object(root["weight_fn"], "weight_fn");
        reject_unknown(w, "weight_fn.", {"fourier_nodes", "t_max_factor"});
        if (w.contains("fourier_nodes"))
            cfg.weight_fn.fourier_nodes = get_node_count(w["fourier_nodes"], "weight_fn.fourier_nodes");
        if (w.contains("t_max_factor"))
            cfg.weight_fn.t_max_factor = get_real(w["t_max_factor"], "weight_fn.t_max_factor");
    }
    if (root.contains("quadrature")) {
        const json& q = require_object(root["quadrature"], "quadrature");
        reject_unknown(q, "quadrature.", {"t_nodes", "u_nodes", "contour_nodes"});
        if (q.contains("t_nodes")) cfg.quadrature.t_nodes = get_node_count(q["t_nodes"], "quadrature.t_nodes");
        if (q.contains("u_nodes")) cfg.quadrature.u_nodes = get_node_count(q["u_nodes"], "quadrature.u_nodes");
        if (q.contains("contour_nodes"))
            cfg.quadrature.contour_nodes = get_node_count(q["contour_nodes"], "quadrature.contour_nodes");
    }
    if (root.contains("seed")) {
        const json& s = root["seed"];
        if (!s.is_number_unsigned()) throw ConfigError("seed", "expected an unsigned 64-bit integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("output")) {
        if (!root["output"].is_string()) throw ConfigError("output", "expected a string");
        cfg.output = root["output"].get<std::string>();
    }
    validate(cfg);
    return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
    json params;
    if (cfg.model.name == "two_level") {
        params["kappa"] = cfg.model.kappa;
    } else if (cfg.model.name == "random_gapped") {
        params = {{"dim", cfg.model.dim}, {"gap", cfg.model.gap}, {"epsilon", cfg.model.epsilon}};
    } else {
        params["sites"] = cfg.model.sites;
    }
    json j = {
        {"command", std::string(to_string(cfg.command))},
        {"model", {{"name", cfg.model.name}, {"params", params}}},
        {"s_grid", {{"start", cfg.s_grid.start}, {"end", cfg.s_grid.end}, {"steps", cfg.s_grid.steps}}},
        {"weight_fn",
         {{"fourier_nodes", cfg.weight_fn.fourier_nodes}, {"t_max_factor", cfg.weight_fn.t_max_factor}}},
        {"quadrature",
         {{"t_nodes", cfg.quadrature.t_nodes},
          {"u_nodes", cfg.quadrature.u_nodes},
          {"contour_nodes", cfg.quadrature.contour_nodes}}},
        {"seed", cfg.seed},
    };
    j["gamma"] = cfg.gamma ? json(*cfg.gamma) : json(nullptr);
    j["output"] = cfg.output ? json(*cfg.output) : json(nullptr);
    return j.dump();
}

Model build_model(const ScenarioConfig& cfg) {
    const Interval domain{cfg.s_grid.start, cfg.s_grid.end};
    Model model = [&] {
        if (cfg.model.name == "two_level") return two_level_model(cfg.model.kappa, domain);
        if (cfg.model.name == "random_gapped")
            return random_gapped_model(cfg.model.dim, cfg.model.gap, cfg.model.epsilon, cfg.seed, domain);
        return tfim_model(cfg.model.sites, domain);
    }();
    if (cfg.gamma) model.gamma = *cfg.gamma;
    return model;
}

std::vector<double> build_grid(const GridConfig& grid) {
    std::vector<double> s(grid.steps + 1);
    for (std::size_t k = 0; k <= grid.steps; ++k)
        s[k] = grid.start + (grid.end - grid.start) * static_cast<double>(k) / static_cast<double>(grid.steps);
    s.back() = grid.end;
    return s;
}

}  // namespace doiflow
