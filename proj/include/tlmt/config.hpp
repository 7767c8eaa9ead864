#pragma once

// Task configuration: a JSON file with the formula text, the constant
// assignment, the goal map, environment and agent parameters. Loading
// validates everything up front; compilation to a task happens here too.

#include <memory>
#include <string>

#include "tlmt/agent.hpp"
#include "tlmt/augment.hpp"
#include "tlmt/envs.hpp"
#include "tlmt/product.hpp"

namespace tlmt::config {

struct LoadedTask {
    std::string raw_bytes;  // exact config file contents (snapshot contract)

    product::CompiledTask task;
    augment::GoalSpec goal;
    agent::TrainSpec agent_spec;

    std::string env_name;
    envs::ParkingParams parking_params;
    envs::ReacherParams reacher_params;

    std::unique_ptr<envs::Env> make_env() const;
};

LoadedTask load_task_file(const std::string& path);
LoadedTask load_task_text(const std::string& json_text);

// Trace CSV: header row with the signature variables in order, then one
// state per row.
std::vector<theory::VarAssignment> parse_trace_csv(const std::string& text,
                                                   const syntax::Signature& sig);

}  // namespace tlmt::config
