#include "tlmt/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tlmt/util.hpp"

namespace tlmt::config {

using nlohmann::json;

namespace {

double get_num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
    return j[key].get<double>();
}

envs::ParkingParams parse_parking(const json& j) {
    envs::ParkingParams p;
    p.dt = get_num(j, "dt", p.dt);
    p.wheelbase = get_num(j, "wheelbase", p.wheelbase);
    p.bound = get_num(j, "bound", p.bound);
    p.max_speed = get_num(j, "max_speed", p.max_speed);
    p.max_accel = get_num(j, "max_accel", p.max_accel);
    p.max_steer = get_num(j, "max_steer", p.max_steer);
    p.start_x = get_num(j, "start_x", p.start_x);
    p.start_y = get_num(j, "start_y", p.start_y);
    p.start_radius = get_num(j, "start_radius", p.start_radius);
    p.start_heading = get_num(j, "start_heading", p.start_heading);
    if (p.dt <= 0.0) throw ConfigError("config: env dt must be positive");
    return p;
}

envs::ReacherParams parse_reacher(const json& j) {
    envs::ReacherParams p;
    p.dt = get_num(j, "dt", p.dt);
    p.l1 = get_num(j, "l1", p.l1);
    p.l2 = get_num(j, "l2", p.l2);
    p.max_omega = get_num(j, "max_omega", p.max_omega);
    p.torque_scale = get_num(j, "torque_scale", p.torque_scale);
    p.start_range = get_num(j, "start_range", p.start_range);
    if (p.dt <= 0.0) throw ConfigError("config: env dt must be positive");
    return p;
}

agent::TileCodingConfig parse_tiles(const json& j, const std::vector<std::string>& variables,
                                    double default_lo, double default_hi) {
    agent::TileCodingConfig tc;
    std::vector<std::string> dim_names = {"x", "y"};
    std::vector<std::pair<double, double>> ranges;
    if (!j.is_null()) {
        tc.tilings = static_cast<std::uint32_t>(get_num(j, "tilings", tc.tilings));
        tc.tiles = static_cast<std::uint32_t>(get_num(j, "tiles", tc.tiles));
        if (j.contains("dims")) dim_names = j["dims"].get<std::vector<std::string>>();
        if (j.contains("ranges")) {
            for (const auto& r : j["ranges"]) {
                if (!r.is_array() || r.size() != 2) {
                    throw ConfigError("config: tiles.ranges entries must be [lo, hi]");
                }
                ranges.emplace_back(r[0].get<double>(), r[1].get<double>());
            }
        }
    }
    if (ranges.empty()) ranges.assign(dim_names.size(), {default_lo, default_hi});
    if (ranges.size() != dim_names.size()) {
        throw ConfigError("config: tiles.ranges must match tiles.dims");
    }
    for (const auto& name : dim_names) {
        auto it = std::find(variables.begin(), variables.end(), name);
        if (it == variables.end()) {
            throw ConfigError("config: tiled dimension '" + name + "' is not a state variable");
        }
        tc.dims.push_back(static_cast<std::uint32_t>(it - variables.begin()));
    }
    tc.ranges = std::move(ranges);
    return tc;
}

}  // namespace

std::unique_ptr<envs::Env> LoadedTask::make_env() const {
    if (env_name == "parking") return std::make_unique<envs::ParkingEnv>(parking_params);
    if (env_name == "reacher") return std::make_unique<envs::ReacherEnv>(reacher_params);
    throw ConfigError("unknown environment '" + env_name + "'");
}

LoadedTask load_task_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    LoadedTask out;
    out.raw_bytes = json_text;

    if (!j.contains("formula") || !j["formula"].is_string()) {
        throw ConfigError("config: 'formula' (string) is required");
    }
    std::string formula_text = j["formula"].get<std::string>();

    theory::ConstAssignment constants;
    if (j.contains("constants")) {
        for (const auto& [name, value] : j["constants"].items()) {
            if (!value.is_number()) throw ConfigError("config: constant '" + name + "' must be a number");
            double v = value.get<double>();
            if (!std::isfinite(v)) throw ConfigError("config: constant '" + name + "' must be finite");
            constants[name] = v;
        }
    }

    // environment
    out.env_name = "parking";
    json env_params;
    if (j.contains("env")) {
        const auto& env = j["env"];
        if (env.contains("name")) out.env_name = env["name"].get<std::string>();
        if (env.contains("params")) env_params = env["params"];
    }
    std::vector<std::string> variables;
    double range_lo = -1.0, range_hi = 1.0;
    if (out.env_name == "parking") {
        out.parking_params = parse_parking(env_params.is_null() ? json::object() : env_params);
        variables = envs::ParkingEnv(out.parking_params).variable_names();
        range_lo = -out.parking_params.bound;
        range_hi = out.parking_params.bound;
    } else if (out.env_name == "reacher") {
        out.reacher_params = parse_reacher(env_params.is_null() ? json::object() : env_params);
        variables = envs::ReacherEnv(out.reacher_params).variable_names();
        double reach = out.reacher_params.l1 + out.reacher_params.l2;
        range_lo = -reach;
        range_hi = reach;
    } else {
        throw ConfigError("config: unknown env name '" + out.env_name + "'");
    }

    // formula: parse, resolve against env variables + declared constants
    syntax::PhiPtr ast = syntax::parse_formula(formula_text);
    std::set<std::string> const_names;
    for (const auto& [name, v] : constants) {
        (void)v;
        const_names.insert(name);
    }
    auto [resolved, sig] = syntax::resolve(ast, const_names, variables);

    // product options
    bool dead_termination = true;
    bool minimize_dfa = true;
    std::uint32_t state_cap = 4096;
    if (j.contains("product")) {
        const auto& p = j["product"];
        if (p.contains("dead_state_termination")) {
            dead_termination = p["dead_state_termination"].get<bool>();
        }
        if (p.contains("minimize")) minimize_dfa = p["minimize"].get<bool>();
        if (p.contains("state_cap")) state_cap = p["state_cap"].get<std::uint32_t>();
    }

    out.task = product::compile_task(resolved, sig, constants, dead_termination, minimize_dfa,
                                     state_cap);

    // goal map
    if (j.contains("goal_map")) {
        for (const auto& [c, var] : j["goal_map"].items()) {
            out.goal.goal_constants.push_back(c);
            out.goal.goal_map[c] = var.get<std::string>();
        }
        out.goal.validate(sig, constants);
    }

    // agent
    json a = j.contains("agent") ? j["agent"] : json::object();
    agent::TrainSpec& spec = out.agent_spec;
    spec.episodes = static_cast<std::uint32_t>(get_num(a, "episodes", spec.episodes));
    spec.max_steps = static_cast<std::uint32_t>(get_num(a, "max_steps", spec.max_steps));
    spec.epsilon_start = get_num(a, "epsilon_start", spec.epsilon_start);
    spec.epsilon_end = get_num(a, "epsilon_end", spec.epsilon_end);
    spec.epsilon_decay_fraction = get_num(a, "epsilon_decay_fraction", spec.epsilon_decay_fraction);
    spec.alpha = get_num(a, "alpha", spec.alpha);
    spec.gamma = get_num(a, "gamma", spec.gamma);
    spec.batch_size = static_cast<std::uint32_t>(get_num(a, "batch_size", spec.batch_size));
    spec.updates_per_step =
        static_cast<std::uint32_t>(get_num(a, "updates_per_step", spec.updates_per_step));
    spec.eval_period = static_cast<std::uint32_t>(get_num(a, "eval_period", spec.eval_period));
    spec.eval_episodes = static_cast<std::uint32_t>(get_num(a, "eval_episodes", spec.eval_episodes));
    spec.buffer_capacity =
        static_cast<std::size_t>(get_num(a, "buffer_capacity", static_cast<double>(spec.buffer_capacity)));
    spec.seed = static_cast<std::uint64_t>(get_num(a, "seed", 0.0));
    if (a.contains("mode")) spec.mode = agent::mode_from_text(a["mode"].get<std::string>());
    if (a.contains("action_levels")) {
        spec.actions.levels = a["action_levels"].get<std::vector<double>>();
        if (spec.actions.levels.empty()) throw ConfigError("config: action_levels must be non-empty");
    }
    spec.actions.dims = 2;
    spec.tiles = parse_tiles(a.contains("tiles") ? a["tiles"] : json(), variables, range_lo,
                             range_hi);

    if (spec.max_steps == 0) throw ConfigError("config: agent.max_steps must be at least 1");
    if (spec.epsilon_start < 0 || spec.epsilon_start > 1 || spec.epsilon_end < 0 ||
        spec.epsilon_end > 1) {
        throw ConfigError("config: epsilon must lie in [0, 1]");
    }
    return out;
}

LoadedTask load_task_file(const std::string& path) {
    return load_task_text(read_file(path));
}

std::vector<theory::VarAssignment> parse_trace_csv(const std::string& text,
                                                   const syntax::Signature& sig) {
    std::vector<theory::VarAssignment> trace;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("trace CSV: missing header row");
    }
    auto header = split_csv_line(line);
    if (header.size() != sig.variables.size()) {
        throw ConfigError("trace CSV: header has " + std::to_string(header.size()) +
                          " columns, signature has " + std::to_string(sig.variables.size()));
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] != sig.variables[i]) {
            throw ConfigError("trace CSV: column " + std::to_string(i) + " is '" + header[i] +
                              "', expected '" + sig.variables[i] + "'");
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != sig.variables.size()) {
            throw ConfigError("trace CSV: row with " + std::to_string(cells.size()) + " cells");
        }
        theory::VarAssignment mu;
        mu.reserve(cells.size());
        for (const auto& cell : cells) {
            try {
                mu.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("trace CSV: '" + cell + "' is not a number");
            }
        }
        trace.push_back(std::move(mu));
    }
    return trace;
}

}  // namespace tlmt::config
