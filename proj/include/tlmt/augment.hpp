#pragma once

// Replay buffer and the three augmentation strategies: counterfactual
// automaton-state sweeps (CRM), goal relabeling through constant
// substitution (HER), and their combination.
//
// HER here is formula-level: the goal constants are replaced by the values
// the mapped state variables actually reached at the end of the trajectory,
// the letter payloads are rebuilt, and the stored raw states are re-run
// through the unchanged DFA. The formula's own threshold supplies the
// tolerance; no goal-equality indicator is involved.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tlmt/product.hpp"
#include "tlmt/rng.hpp"

namespace tlmt::augment {

enum class Tag : std::uint8_t { Real, Crm, Her };

const char* tag_text(Tag t);

struct TaggedTransition {
    product::ProductTransition tr;
    Tag tag = Tag::Real;
};

// ── Replay buffer ───────────────────────────────────────────────────────────

class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(product::ProductTransition tr, Tag tag);
    void push_trajectory(const product::Trajectory& traj, Tag tag);

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const TaggedTransition& at(std::size_t i) const;

    struct Census {
        std::uint64_t real = 0, crm = 0, her = 0;
    };
    const Census& census() const { return census_; }

    // n uniform draws with replacement; reproducible for a given seed.
    std::vector<TaggedTransition> sample(std::size_t n, std::uint64_t rng_seed) const;

    std::string dump_csv(const syntax::Signature& sig) const;
    static ReplayBuffer restore_csv(const std::string& csv, const syntax::Signature& sig,
                                    std::size_t capacity);

  private:
    std::size_t capacity_;
    std::size_t next_ = 0;  // FIFO eviction cursor once full
    std::vector<TaggedTransition> data_;
    Census census_;
};

// ── Goal specification ──────────────────────────────────────────────────────

// Which constants HER may rewrite, and which state variable supplies each
// one's achieved value.
struct GoalSpec {
    std::vector<std::string> goal_constants;               // ordered
    std::map<std::string, std::string> goal_map;           // constant -> variable name

    bool empty() const { return goal_constants.empty(); }
    // delta mapping each goal constant to its achieved value in final_state.
    theory::ConstAssignment achieved_goals(const theory::VarAssignment& final_state,
                                           const syntax::Signature& sig) const;
    void validate(const syntax::Signature& sig, const theory::ConstAssignment& constants) const;
};

// ── Augmentation operations ─────────────────────────────────────────────────

// |Q| counterfactual copies of one real transition, the automaton state
// swept over all of Q. The copy with q = tr.from.q reproduces tr exactly.
// The successor label is computed once and shared.
std::vector<product::ProductTransition> crm_expand(const product::CompiledTask& task,
                                                   const product::ProductTransition& tr);

// Re-run stored raw states through the DFA from `start_q` using `letters`
// as the labeling function; actions are carried over from the source
// trajectory. Truncates at the first acceptance (and at a dead entry when
// the task terminates on dead states). Also the trace-consistency checker.
product::Trajectory rerun(const product::CompiledTask& task, const product::Trajectory& source,
                          std::uint32_t start_q, const abstraction::LetterTable& letters);

// Goal relabeling: substitute achieved goal values into the letter payloads
// and re-run the trajectory from its own automaton start.
product::Trajectory her_relabel(const product::CompiledTask& task,
                                const product::Trajectory& traj, const GoalSpec& spec);

// |Q| counterfactual trajectory copies plus their |Q| HER relabelings:
// 2|Q| artificial trajectories per real one.
std::vector<product::Trajectory> crm_her_expand(const product::CompiledTask& task,
                                                const product::Trajectory& traj,
                                                const GoalSpec& spec);

}  // namespace tlmt::augment
