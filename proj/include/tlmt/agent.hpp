#pragma once

// Tile-coded linear Q-learning over the product MDP with an epsilon-greedy
// policy on a discretized action grid. The automaton state is one-hot (its
// own weight slice), never tiled.

#include <cstdint>
#include <string>
#include <vector>

#include "tlmt/augment.hpp"
#include "tlmt/envs.hpp"
#include "tlmt/product.hpp"
#include "tlmt/rng.hpp"

namespace tlmt::agent {

enum class Mode : std::uint8_t { Baseline, Crm, Her, CrmHer };

// Names exactly as the four replay-level baselines are called.
const char* mode_text(Mode m);
Mode mode_from_text(const std::string& s);

// ── Action grid ─────────────────────────────────────────────────────────────

// Cartesian grid over the continuous action space (default 3 levels per
// dimension: -1, 0, 1).
struct ActionGrid {
    std::vector<double> levels = {-1.0, 0.0, 1.0};
    std::uint32_t dims = 2;

    std::uint32_t size() const;
    std::vector<double> action(std::uint32_t index) const;
    // Index whose action is componentwise nearest (buffer actions are always
    // exact grid points).
    std::uint32_t index_of(const std::vector<double>& action) const;
};

// ── Tile coding ─────────────────────────────────────────────────────────────

struct TileCodingConfig {
    std::uint32_t tilings = 8;
    std::uint32_t tiles = 8;                       // per dimension
    std::vector<std::uint32_t> dims;               // state-vector indices to tile
    std::vector<std::pair<double, double>> ranges; // value range per tiled dim
};

class QFunction {
  public:
    QFunction(TileCodingConfig tc, std::uint32_t num_q, std::uint32_t num_actions, double alpha);

    const TileCodingConfig& tile_config() const { return tc_; }
    std::uint32_t num_q() const { return num_q_; }
    std::uint32_t num_actions() const { return num_actions_; }
    double alpha() const { return alpha_; }

    // One active tile per tiling.
    void active_tiles(const theory::VarAssignment& s, std::vector<std::uint32_t>& out) const;

    double value(const std::vector<std::uint32_t>& tiles, std::uint32_t q, std::uint32_t a) const;
    double max_value(const std::vector<std::uint32_t>& tiles, std::uint32_t q) const;
    std::uint32_t greedy(const std::vector<std::uint32_t>& tiles, std::uint32_t q) const;

    // Semi-gradient step: each active tile moves by (alpha / tilings) * delta.
    void update(const std::vector<std::uint32_t>& tiles, std::uint32_t q, std::uint32_t a,
                double delta);

    std::string serialize() const;
    static QFunction deserialize(const std::string& blob);

  private:
    std::size_t weight_index(std::uint32_t tile, std::uint32_t q, std::uint32_t a) const;

    TileCodingConfig tc_;
    std::uint32_t num_q_;
    std::uint32_t num_actions_;
    double alpha_;
    std::uint32_t cells_per_tiling_;
    std::vector<double> w_;
};

// ── Operations ──────────────────────────────────────────────────────────────

// Epsilon-greedy action index; greedy ties break to the lowest index.
std::uint32_t act(const QFunction& qf, const product::ProductState& ps, double epsilon, Rng& rng);

// One Q-learning step per sample; done transitions bootstrap zero.
// Returns the mean TD error of the batch.
double td_update(QFunction& qf, const ActionGrid& grid,
                 const std::vector<augment::TaggedTransition>& batch, double gamma);

// ── Training ────────────────────────────────────────────────────────────────

struct TrainSpec {
    std::uint32_t episodes = 2000;
    std::uint32_t max_steps = 200;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.6;  // linear decay over this share of episodes
    double alpha = 0.1;
    double gamma = 0.99;
    std::uint32_t batch_size = 32;
    std::uint32_t updates_per_step = 1;
    std::uint32_t eval_period = 25;    // evaluate every this many training episodes
    std::uint32_t eval_episodes = 20;
    std::size_t buffer_capacity = 100000;
    Mode mode = Mode::Baseline;
    std::uint64_t seed = 0;
    ActionGrid actions;
    TileCodingConfig tiles;
};

struct EpisodeRow {
    std::uint64_t seed = 0;
    std::uint32_t episode = 0;
    std::uint32_t steps = 0;
    double episode_return = 0.0;
    bool success = false;
    Mode mode = Mode::Baseline;
    std::uint64_t buffer_real = 0, buffer_crm = 0, buffer_her = 0;
};

struct EvalRow {
    std::uint64_t seed = 0;
    std::uint32_t train_episode = 0;  // episodes completed when this eval ran
    std::uint32_t eval_episode = 0;
    std::uint32_t steps = 0;
    bool success = false;
};

struct TrainResult {
    std::vector<EpisodeRow> episodes;
    std::vector<EvalRow> evals;
    QFunction qf;

    // Mean success over the trailing eval episodes (all if fewer).
    double final_eval_success(std::size_t window = 50) const;
};

TrainResult train(const product::CompiledTask& task, envs::Env& env, const augment::GoalSpec& goal,
                  const TrainSpec& spec);

double evaluate(const product::CompiledTask& task, envs::Env& env, const QFunction& qf,
                const ActionGrid& grid, std::uint32_t n_episodes, std::uint32_t max_steps,
                std::uint64_t seed);

std::string metrics_to_csv(const std::vector<EpisodeRow>& rows);
std::string evals_to_csv(const std::vector<EvalRow>& rows);

}  // namespace tlmt::agent
