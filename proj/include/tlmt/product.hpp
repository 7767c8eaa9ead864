#pragma once

// Product-MDP runtime: wraps an environment, tracks the DFA state through
// the labeling function, and dispenses the binary reward on transitions
// into an accepting state. The label of the reset state is consumed
// immediately — the episode's trace starts at s0.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlmt/abstraction.hpp"
#include "tlmt/automaton.hpp"
#include "tlmt/envs.hpp"
#include "tlmt/syntax.hpp"
#include "tlmt/theory.hpp"

namespace tlmt::product {

enum class DoneReason : std::uint8_t { None, Accepted, Dead, Timeout };

const char* done_reason_text(DoneReason r);

struct ProductState {
    theory::VarAssignment env_state;
    std::uint32_t q = 0;
};

struct ProductTransition {
    ProductState from;
    std::vector<double> action;
    double reward = 0.0;  // 0 or 1
    ProductState to;
    bool done = false;
    DoneReason done_reason = DoneReason::None;
};

// Everything needed to run a task: automaton, letters, constants, signature
// and the dead-state set (states from which no accepting state is
// reachable).
struct CompiledTask {
    syntax::PhiPtr formula;  // resolved
    syntax::Signature signature;
    theory::ConstAssignment constants;
    abstraction::LetterTable letters;
    automaton::Dfa dfa;
    std::vector<std::uint8_t> dead;  // per DFA state
    bool dead_state_termination = true;

    bool is_dead(std::uint32_t q) const { return dead[q] != 0; }
};

// States from which accepting is unreachable (reverse BFS from accepting).
std::vector<std::uint8_t> dead_states(const automaton::Dfa& d);

// Build a CompiledTask from a resolved formula: abstract, compile, minimize.
CompiledTask compile_task(const syntax::PhiPtr& resolved, const syntax::Signature& sig,
                          const theory::ConstAssignment& constants,
                          bool dead_state_termination = true, bool minimize_dfa = true,
                          std::uint32_t state_cap = 4096);

// The Markov core: (q, s') fully determines the successor automaton state,
// reward and termination. Shared by the live runtime and the replay
// augmentation, and directly testable for the Markov property.
struct Advance {
    std::uint32_t q_next = 0;
    double reward = 0.0;
    bool done = false;
    DoneReason reason = DoneReason::None;
};
Advance advance(const CompiledTask& task, std::uint32_t q, abstraction::Bitmask label,
                bool out_of_budget);

// One episode over (task, env). reset() consumes the initial label; step()
// throws if the episode is already done.
class Episode {
  public:
    Episode(const CompiledTask& task, envs::Env& env, std::uint32_t max_steps);

    ProductState reset(std::uint64_t seed);
    ProductTransition step(std::span<const double> action);

    const ProductState& current() const { return current_; }
    bool done() const { return done_; }
    DoneReason reason() const { return reason_; }
    std::uint32_t steps_taken() const { return steps_; }

  private:
    const CompiledTask& task_;
    envs::Env& env_;
    std::uint32_t max_steps_;
    std::uint32_t steps_ = 0;
    bool done_ = false;
    DoneReason reason_ = DoneReason::None;
    ProductState current_;
};

struct Trajectory {
    std::uint32_t initial_q = 0;  // automaton state before consuming the s0 label
    std::uint32_t q_after_reset = 0;
    std::vector<theory::VarAssignment> states;  // s0..sT (transitions.size() + 1 entries)
    std::vector<ProductTransition> transitions;
    DoneReason end_reason = DoneReason::None;
    bool success() const { return end_reason == DoneReason::Accepted; }
    double total_reward() const;
};

using Policy = std::function<std::vector<double>(const ProductState&)>;

Trajectory rollout(const CompiledTask& task, envs::Env& env, const Policy& policy,
                   std::uint32_t max_steps, std::uint64_t seed);

// Trajectory CSV: one row per visited state (step, state variables in
// signature order, action taken from it — empty on the last row — then the
// automaton state after consuming that state's label, the reward earned
// entering it, and the done reason at that point).
std::string trajectory_to_csv(const Trajectory& traj, const syntax::Signature& sig);

}  // namespace tlmt::product
