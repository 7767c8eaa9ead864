#include "tlmt/product.hpp"

#include <deque>

#include "tlmt/util.hpp"

namespace tlmt::product {

const char* done_reason_text(DoneReason r) {
    switch (r) {
        case DoneReason::None: return "none";
        case DoneReason::Accepted: return "accepted";
        case DoneReason::Dead: return "dead";
        case DoneReason::Timeout: return "timeout";
    }
    return "?";
}

std::vector<std::uint8_t> dead_states(const automaton::Dfa& d) {
    const std::uint32_t n = d.num_states();
    // reverse adjacency over the transition graph
    std::vector<std::vector<std::uint32_t>> rev(n);
    for (std::uint32_t q = 0; q < n; ++q) {
        for (std::uint32_t nu = 0; nu < d.alphabet_size(); ++nu) {
            rev[d.delta[q][nu]].push_back(q);
        }
    }
    std::vector<std::uint8_t> co_reachable(n, 0);
    std::deque<std::uint32_t> frontier;
    for (std::uint32_t q = 0; q < n; ++q) {
        if (d.accepting[q]) {
            co_reachable[q] = 1;
            frontier.push_back(q);
        }
    }
    while (!frontier.empty()) {
        std::uint32_t q = frontier.front();
        frontier.pop_front();
        for (std::uint32_t p : rev[q]) {
            if (!co_reachable[p]) {
                co_reachable[p] = 1;
                frontier.push_back(p);
            }
        }
    }
    std::vector<std::uint8_t> dead(n, 0);
    for (std::uint32_t q = 0; q < n; ++q) dead[q] = co_reachable[q] ? 0 : 1;
    return dead;
}

CompiledTask compile_task(const syntax::PhiPtr& resolved, const syntax::Signature& sig,
                          const theory::ConstAssignment& constants, bool dead_state_termination,
                          bool minimize_dfa, std::uint32_t state_cap) {
    CompiledTask task;
    task.formula = resolved;
    task.signature = sig;
    task.constants = constants;
    task.dead_state_termination = dead_state_termination;

    prop::Factory factory;
    auto abs = abstraction::abstract_formula(resolved, factory);
    task.letters = std::move(abs.table);

    automaton::CompileOptions opts;
    opts.state_cap = state_cap;
    automaton::Dfa dfa = automaton::compile(factory, abs.formula, task.letters.size(), opts);
    task.dfa = minimize_dfa ? automaton::minimize(dfa) : std::move(dfa);
    task.dead = dead_states(task.dfa);
    return task;
}

Advance advance(const CompiledTask& task, std::uint32_t q, abstraction::Bitmask label,
                bool out_of_budget) {
    Advance a;
    a.q_next = task.dfa.step(q, label);
    bool was_accepting = task.dfa.is_accepting(q);
    bool now_accepting = task.dfa.is_accepting(a.q_next);
    a.reward = (now_accepting && !was_accepting) ? 1.0 : 0.0;
    if (now_accepting) {
        a.done = true;
        a.reason = DoneReason::Accepted;
    } else if (task.dead_state_termination && task.is_dead(a.q_next)) {
        a.done = true;
        a.reason = DoneReason::Dead;
    } else if (out_of_budget) {
        a.done = true;
        a.reason = DoneReason::Timeout;
    }
    return a;
}

// ── Episode ─────────────────────────────────────────────────────────────────

Episode::Episode(const CompiledTask& task, envs::Env& env, std::uint32_t max_steps)
    : task_(task), env_(env), max_steps_(max_steps) {
    if (max_steps == 0) throw ConfigError("max_steps must be at least 1");
}

ProductState Episode::reset(std::uint64_t seed) {
    theory::VarAssignment s0 = env_.reset(seed);
    abstraction::Bitmask label = abstraction::label_state(task_.letters, s0, task_.constants);
    std::uint32_t q = task_.dfa.step(task_.dfa.initial, label);
    current_ = ProductState{std::move(s0), q};
    steps_ = 0;
    done_ = false;
    reason_ = DoneReason::None;
    if (task_.dfa.is_accepting(q)) {
        done_ = true;
        reason_ = DoneReason::Accepted;
    } else if (task_.dead_state_termination && task_.is_dead(q)) {
        done_ = true;
        reason_ = DoneReason::Dead;
    }
    return current_;
}

ProductTransition Episode::step(std::span<const double> action) {
    if (done_) {
        throw EvalError("Episode::step called on a finished episode (" +
                        std::string(done_reason_text(reason_)) + ")");
    }
    theory::VarAssignment s_next = env_.step(action);
    ++steps_;
    abstraction::Bitmask label = abstraction::label_state(task_.letters, s_next, task_.constants);
    Advance a = advance(task_, current_.q, label, steps_ >= max_steps_);

    ProductTransition tr;
    tr.from = current_;
    tr.action.assign(action.begin(), action.end());
    tr.reward = a.reward;
    tr.to = ProductState{std::move(s_next), a.q_next};
    tr.done = a.done;
    tr.done_reason = a.reason;

    current_ = tr.to;
    done_ = a.done;
    reason_ = a.reason;
    return tr;
}

// ── Rollout ─────────────────────────────────────────────────────────────────

double Trajectory::total_reward() const {
    double sum = 0.0;
    for (const auto& tr : transitions) sum += tr.reward;
    return sum;
}

Trajectory rollout(const CompiledTask& task, envs::Env& env, const Policy& policy,
                   std::uint32_t max_steps, std::uint64_t seed) {
    Episode ep(task, env, max_steps);
    Trajectory traj;
    traj.initial_q = task.dfa.initial;
    ProductState ps = ep.reset(seed);
    traj.q_after_reset = ps.q;
    traj.states.push_back(ps.env_state);
    while (!ep.done()) {
        std::vector<double> action = policy(ep.current());
        ProductTransition tr = ep.step(action);
        traj.states.push_back(tr.to.env_state);
        traj.transitions.push_back(std::move(tr));
    }
    traj.end_reason = ep.reason();
    return traj;
}

// ── CSV ─────────────────────────────────────────────────────────────────────

std::string trajectory_to_csv(const Trajectory& traj, const syntax::Signature& sig) {
    std::string out = "step";
    for (const auto& v : sig.variables) out += "," + v;
    std::size_t action_dim = traj.transitions.empty() ? 0 : traj.transitions[0].action.size();
    for (std::size_t i = 0; i < action_dim; ++i) out += ",a" + std::to_string(i);
    out += ",q,reward,done_reason\n";

    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out += std::to_string(k);
        for (double v : traj.states[k]) out += "," + format_double(v);
        for (std::size_t i = 0; i < action_dim; ++i) {
            out += ",";
            if (k < traj.transitions.size()) out += format_double(traj.transitions[k].action[i]);
        }
        std::uint32_t q = (k == 0) ? traj.q_after_reset : traj.transitions[k - 1].to.q;
        double reward = (k == 0) ? 0.0 : traj.transitions[k - 1].reward;
        DoneReason reason = (k == 0) ? DoneReason::None : traj.transitions[k - 1].done_reason;
        out += "," + std::to_string(q);
        out += "," + format_double(reward);
        out += ",";
        out += done_reason_text(reason);
        out += "\n";
    }
    return out;
}

}  // namespace tlmt::product
