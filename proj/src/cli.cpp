#include "tlmt/cli.hpp"

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "tlmt/agent.hpp"
#include "tlmt/config.hpp"
#include "tlmt/log.hpp"
#include "tlmt/util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tlmt::cli {

namespace fs = std::filesystem;

namespace {

void write_compile_artifacts(const config::LoadedTask& loaded, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const auto& task = loaded.task;
    write_file_atomic(out_dir / "dfa.json", automaton::dfa_to_json(task.dfa, task.letters));
    write_file_atomic(out_dir / "dfa.dot", automaton::dfa_to_dot(task.dfa, task.letters));
    std::string report;
    for (const auto& e : task.letters.entries) {
        report += e.name + ": " + syntax::print_lambda(e.payload) + "\n";
    }
    write_file_atomic(out_dir / "letters.txt", report);
    write_file_atomic(out_dir / "config_snapshot.json", loaded.raw_bytes);
}

int cmd_compile(const std::string& config_path, const std::string& out_dir) {
    config::LoadedTask loaded = config::load_task_file(config_path);
    write_compile_artifacts(loaded, out_dir);
    const auto& dfa = loaded.task.dfa;
    std::cout << "letters: " << loaded.task.letters.size() << "\n";
    std::cout << "states: " << dfa.num_states() << " (pre-minimization: "
              << dfa.pre_minimization_states << ")\n";
    std::cout << "accepting: " << dfa.accepting_ids().size() << "\n";
    std::cout << "artifacts: " << out_dir << "\n";
    return kExitOk;
}

int cmd_label(const std::string& config_path, const std::string& trace_path,
              const std::string& out_path) {
    config::LoadedTask loaded = config::load_task_file(config_path);
    auto trace = config::parse_trace_csv(read_file(trace_path), loaded.task.signature);
    std::string csv = "step,bitmask\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        auto mask = abstraction::label_state(loaded.task.letters, trace[i], loaded.task.constants);
        csv += std::to_string(i) + "," + std::to_string(mask) + "\n";
    }
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        write_file_atomic(out_path, csv);
    }
    return kExitOk;
}

int cmd_oracle(const std::string& config_path, const std::string& trace_path) {
    config::LoadedTask loaded = config::load_task_file(config_path);
    auto trace = config::parse_trace_csv(read_file(trace_path), loaded.task.signature);
    bool accepted = automaton::ltlfmt_eval(loaded.task.formula, trace, loaded.task.constants, 0);
    std::cout << (accepted ? "true" : "false") << "\n";
    return kExitOk;
}

int cmd_train(const std::string& config_path, int seeds, const std::string& mode_override,
              const std::string& out_dir, int dump_trajectories) {
    config::LoadedTask loaded = config::load_task_file(config_path);
    if (!mode_override.empty()) {
        loaded.agent_spec.mode = agent::mode_from_text(mode_override);
    }
    if (seeds < 1) throw ConfigError("--seeds must be at least 1");

    fs::create_directories(out_dir);
    write_compile_artifacts(loaded, out_dir);

    std::vector<std::string> errors(seeds);
    std::vector<char> failed(seeds, 0);

    // Seeds are independent runs over independent env instances; their
    // artifacts are distinct files, so the fan-out is embarrassingly
    // parallel and output bytes do not depend on the schedule.
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < seeds; ++i) {
        try {
            agent::TrainSpec spec = loaded.agent_spec;
            spec.seed = loaded.agent_spec.seed + static_cast<std::uint64_t>(i);
            auto env = loaded.make_env();
            agent::TrainResult result = agent::train(loaded.task, *env, loaded.goal, spec);

            std::string tag = "seed" + std::to_string(spec.seed);
            write_file_atomic(fs::path(out_dir) / ("metrics_" + tag + ".csv"),
                              agent::metrics_to_csv(result.episodes));
            write_file_atomic(fs::path(out_dir) / ("evals_" + tag + ".csv"),
                              agent::evals_to_csv(result.evals));
            write_file_atomic(fs::path(out_dir) / ("weights_" + tag + ".bin"),
                              result.qf.serialize());

            if (dump_trajectories > 0) {
                auto env2 = loaded.make_env();
                std::string dump;
                for (int k = 0; k < dump_trajectories; ++k) {
                    std::vector<std::uint32_t> tiles;
                    auto traj = product::rollout(
                        loaded.task, *env2,
                        [&](const product::ProductState& ps) {
                            result.qf.active_tiles(ps.env_state, tiles);
                            return spec.actions.action(result.qf.greedy(tiles, ps.q));
                        },
                        spec.max_steps, mix_seed(spec.seed, 0xd00du + k));
                    dump += product::trajectory_to_csv(traj, loaded.task.signature);
                    dump += "\n";
                }
                write_file_atomic(fs::path(out_dir) / ("trajectories_" + tag + ".csv"), dump);
            }
        } catch (const std::exception& e) {
            failed[i] = 1;
            errors[i] = e.what();
        }
    }

    for (int i = 0; i < seeds; ++i) {
        if (failed[i]) {
            std::cerr << "seed " << (loaded.agent_spec.seed + i) << " failed: " << errors[i]
                      << "\n";
            return kExitRuntime;
        }
    }
    std::cout << "trained " << seeds << " seed(s), artifacts in " << out_dir << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& weights_path, int n_episodes,
             std::uint64_t seed) {
    config::LoadedTask loaded = config::load_task_file(config_path);
    agent::QFunction qf = agent::QFunction::deserialize(read_file(weights_path));
    auto env = loaded.make_env();
    double rate = agent::evaluate(loaded.task, *env, qf, loaded.agent_spec.actions,
                                  static_cast<std::uint32_t>(n_episodes),
                                  loaded.agent_spec.max_steps, seed);
    std::cout << "success_rate: " << format_double(rate) << "\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"temporal-logic task compiler and RL harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", trace_path, out_path, weights_path, mode;
    int seeds = 1, n_episodes = 100, dump_trajectories = 0;
    std::uint64_t eval_seed = 12345;

    auto* compile = app.add_subcommand("compile", "compile a task to a DFA and write artifacts");
    compile->add_option("--config", config_path, "task config JSON")->required();
    compile->add_option("--out", out_dir, "output directory");

    auto* label = app.add_subcommand("label", "label a numeric trace with letter bitmasks");
    label->add_option("--config", config_path)->required();
    label->add_option("--trace", trace_path, "trace CSV")->required();
    label->add_option("--out", out_path, "output CSV (default stdout)");

    auto* oracle = app.add_subcommand("oracle", "evaluate the formula directly on a trace");
    oracle->add_option("--config", config_path)->required();
    oracle->add_option("--trace", trace_path, "trace CSV")->required();

    auto* train = app.add_subcommand("train", "train tile-coded Q-learning on the product MDP");
    train->add_option("--config", config_path)->required();
    train->add_option("--seeds", seeds, "number of seeds (base seed comes from the config)");
    train->add_option("--mode", mode, "baseline|crm|her|crm_her (overrides config)");
    train->add_option("--out", out_dir, "output directory");
    train->add_option("--dump-trajectories", dump_trajectories,
                      "dump N greedy trajectories per seed after training");

    auto* eval = app.add_subcommand("eval", "evaluate saved weights greedily");
    eval->add_option("--config", config_path)->required();
    eval->add_option("--weights", weights_path)->required();
    eval->add_option("--n", n_episodes, "evaluation episodes");
    eval->add_option("--seed", eval_seed, "evaluation seed");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (compile->parsed()) return cmd_compile(config_path, out_dir);
        if (label->parsed()) return cmd_label(config_path, trace_path, out_path);
        if (oracle->parsed()) return cmd_oracle(config_path, trace_path);
        if (train->parsed()) return cmd_train(config_path, seeds, mode, out_dir, dump_trajectories);
        if (eval->parsed()) return cmd_eval(config_path, weights_path, n_episodes, eval_seed);
    } catch (const syntax::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const syntax::ResolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CompileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompile;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace tlmt::cli
