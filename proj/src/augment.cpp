#include "tlmt/augment.hpp"

#include <algorithm>
#include <sstream>

#include "tlmt/util.hpp"

namespace tlmt::augment {

using product::CompiledTask;
using product::DoneReason;
using product::ProductTransition;
using product::Trajectory;

const char* tag_text(Tag t) {
    switch (t) {
        case Tag::Real: return "real";
        case Tag::Crm: return "crm";
        case Tag::Her: return "her";
    }
    return "?";
}

// ── ReplayBuffer ────────────────────────────────────────────────────────────

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(product::ProductTransition tr, Tag tag) {
    auto bump = [this](Tag t, std::int64_t d) {
        switch (t) {
            case Tag::Real: census_.real += d; break;
            case Tag::Crm: census_.crm += d; break;
            case Tag::Her: census_.her += d; break;
        }
    };
    if (data_.size() < capacity_) {
        data_.push_back({std::move(tr), tag});
    } else {
        bump(data_[next_].tag, -1);
        data_[next_] = {std::move(tr), tag};
        next_ = (next_ + 1) % capacity_;
    }
    bump(tag, +1);
}

void ReplayBuffer::push_trajectory(const product::Trajectory& traj, Tag tag) {
    for (const auto& tr : traj.transitions) push(tr, tag);
}

const TaggedTransition& ReplayBuffer::at(std::size_t i) const { return data_.at(i); }

std::vector<TaggedTransition> ReplayBuffer::sample(std::size_t n, std::uint64_t rng_seed) const {
    if (data_.empty()) throw EvalError("cannot sample from an empty replay buffer");
    Rng rng(rng_seed);
    std::vector<TaggedTransition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(data_[uniform_below(rng, data_.size())]);
    }
    return out;
}

std::string ReplayBuffer::dump_csv(const syntax::Signature& sig) const {
    // Rows are independent transitions, so both endpoint states are stored
    // (the per-trajectory format shares them across consecutive rows).
    std::string out = "step";
    for (const auto& v : sig.variables) out += ",from_" + v;
    std::size_t action_dim = data_.empty() ? 0 : data_[0].tr.action.size();
    for (std::size_t i = 0; i < action_dim; ++i) out += ",a" + std::to_string(i);
    for (const auto& v : sig.variables) out += ",to_" + v;
    out += ",from_q,q,reward,done_reason,tag\n";
    for (std::size_t i = 0; i < data_.size(); ++i) {
        const auto& [tr, tag] = data_[i];
        out += std::to_string(i);
        for (double v : tr.from.env_state) out += "," + format_double(v);
        for (std::size_t k = 0; k < action_dim; ++k) {
            out += "," + (k < tr.action.size() ? format_double(tr.action[k]) : std::string());
        }
        for (double v : tr.to.env_state) out += "," + format_double(v);
        out += "," + std::to_string(tr.from.q);
        out += "," + std::to_string(tr.to.q);
        out += "," + format_double(tr.reward);
        out += ",";
        out += product::done_reason_text(tr.done_reason);
        out += ",";
        out += tag_text(tag);
        out += "\n";
    }
    return out;
}

ReplayBuffer ReplayBuffer::restore_csv(const std::string& csv, const syntax::Signature& sig,
                                       std::size_t capacity) {
    ReplayBuffer buf(capacity);
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) return buf;
    auto header = split_csv_line(line);
    const std::size_t nvars = sig.variables.size();
    std::size_t action_dim = 0;
    for (const auto& h : header) {
        if (!h.empty() && h[0] == 'a' && h.size() > 1 &&
            std::all_of(h.begin() + 1, h.end(), [](char c) { return std::isdigit(c); })) {
            ++action_dim;
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        std::size_t expect = 1 + nvars + action_dim + nvars + 5;
        if (cells.size() != expect) throw ConfigError("buffer CSV: malformed row");
        ProductTransition tr;
        std::size_t c = 1;
        for (std::size_t i = 0; i < nvars; ++i) tr.from.env_state.push_back(std::stod(cells[c++]));
        for (std::size_t i = 0; i < action_dim; ++i) tr.action.push_back(std::stod(cells[c++]));
        for (std::size_t i = 0; i < nvars; ++i) tr.to.env_state.push_back(std::stod(cells[c++]));
        tr.from.q = static_cast<std::uint32_t>(std::stoul(cells[c++]));
        tr.to.q = static_cast<std::uint32_t>(std::stoul(cells[c++]));
        tr.reward = std::stod(cells[c++]);
        std::string reason = cells[c++];
        std::string tag = cells[c++];
        if (reason == "accepted") tr.done_reason = DoneReason::Accepted;
        else if (reason == "dead") tr.done_reason = DoneReason::Dead;
        else if (reason == "timeout") tr.done_reason = DoneReason::Timeout;
        else tr.done_reason = DoneReason::None;
        tr.done = tr.done_reason != DoneReason::None;
        Tag t = Tag::Real;
        if (tag == "crm") t = Tag::Crm;
        else if (tag == "her") t = Tag::Her;
        buf.push(std::move(tr), t);
    }
    return buf;
}

// ── GoalSpec ────────────────────────────────────────────────────────────────

theory::ConstAssignment GoalSpec::achieved_goals(const theory::VarAssignment& final_state,
                                                 const syntax::Signature& sig) const {
    auto index = sig.variable_index();
    theory::ConstAssignment delta;
    for (const auto& c : goal_constants) {
        const std::string& var = goal_map.at(c);
        delta[c] = final_state.at(index.at(var));
    }
    return delta;
}

void GoalSpec::validate(const syntax::Signature& sig,
                        const theory::ConstAssignment& constants) const {
    auto index = sig.variable_index();
    std::set<std::string> used_vars;
    for (const auto& c : goal_constants) {
        auto it = goal_map.find(c);
        if (it == goal_map.end()) {
            throw ConfigError("goal constant '" + c + "' has no goal_map entry");
        }
        if (!constants.count(c)) {
            throw ConfigError("goal constant '" + c + "' is not in the constant assignment");
        }
        if (!index.count(it->second)) {
            throw ConfigError("goal_map target '" + it->second + "' is not a state variable");
        }
        if (!used_vars.insert(it->second).second) {
            throw ConfigError("goal_map targets must be distinct variables ('" + it->second +
                              "' repeats)");
        }
    }
}

// ── CRM ─────────────────────────────────────────────────────────────────────

std::vector<ProductTransition> crm_expand(const CompiledTask& task, const ProductTransition& tr) {
    // One labeling of s' shared across the whole sweep.
    abstraction::Bitmask label =
        abstraction::label_state(task.letters, tr.to.env_state, task.constants);
    bool budget_timeout = tr.done_reason == DoneReason::Timeout;

    std::vector<ProductTransition> out;
    out.reserve(task.dfa.num_states());
    for (std::uint32_t q = 0; q < task.dfa.num_states(); ++q) {
        product::Advance a = product::advance(task, q, label, budget_timeout);
        ProductTransition copy;
        copy.from = product::ProductState{tr.from.env_state, q};
        copy.action = tr.action;
        copy.reward = a.reward;
        copy.to = product::ProductState{tr.to.env_state, a.q_next};
        copy.done = a.done;
        copy.done_reason = a.reason;
        out.push_back(std::move(copy));
    }
    return out;
}

// ── Trajectory re-runs ──────────────────────────────────────────────────────

Trajectory rerun(const CompiledTask& task, const Trajectory& source, std::uint32_t start_q,
                 const abstraction::LetterTable& letters) {
    Trajectory out;
    out.initial_q = start_q;
    out.end_reason = DoneReason::None;
    if (source.states.empty()) return out;

    // consume the s0 label, as reset did
    std::uint32_t q =
        task.dfa.step(start_q, abstraction::label_state(letters, source.states[0], task.constants));
    out.q_after_reset = q;
    out.states.push_back(source.states[0]);
    if (task.dfa.is_accepting(q)) {
        out.end_reason = DoneReason::Accepted;
        return out;
    }
    if (task.dead_state_termination && task.is_dead(q)) {
        out.end_reason = DoneReason::Dead;
        return out;
    }

    for (std::size_t i = 0; i < source.transitions.size(); ++i) {
        const ProductTransition& src = source.transitions[i];
        abstraction::Bitmask label =
            abstraction::label_state(letters, src.to.env_state, task.constants);
        bool budget_timeout = src.done_reason == DoneReason::Timeout;
        product::Advance a = product::advance(task, q, label, budget_timeout);

        ProductTransition tr;
        tr.from = product::ProductState{src.from.env_state, q};
        tr.action = src.action;
        tr.reward = a.reward;
        tr.to = product::ProductState{src.to.env_state, a.q_next};
        tr.done = a.done;
        tr.done_reason = a.reason;
        q = a.q_next;
        out.states.push_back(src.to.env_state);
        out.transitions.push_back(std::move(tr));

        if (a.done) {
            out.end_reason = a.reason;
            break;
        }
    }
    return out;
}

// ── HER ─────────────────────────────────────────────────────────────────────

Trajectory her_relabel(const CompiledTask& task, const Trajectory& traj, const GoalSpec& spec) {
    if (traj.states.empty()) return traj;
    theory::ConstAssignment delta = spec.achieved_goals(traj.states.back(), task.signature);
    abstraction::LetterTable relabeled = task.letters.with_constants(delta);
    return rerun(task, traj, traj.initial_q, relabeled);
}

// ── CRM + HER ───────────────────────────────────────────────────────────────

std::vector<Trajectory> crm_her_expand(const CompiledTask& task, const Trajectory& traj,
                                       const GoalSpec& spec) {
    std::vector<Trajectory> out;
    out.reserve(2 * task.dfa.num_states());
    // |Q| counterfactual copies: the automaton starts in q instead of q0.
    for (std::uint32_t q = 0; q < task.dfa.num_states(); ++q) {
        out.push_back(rerun(task, traj, q, task.letters));
    }
    // |Q| HER relabelings of those copies (the q = q0 copy's relabeling is
    // exactly the real trajectory's relabeling).
    for (std::uint32_t q = 0; q < task.dfa.num_states(); ++q) {
        out.push_back(her_relabel(task, out[q], spec));
    }
    return out;
}

}  // namespace tlmt::augment
