#include "tlmt/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "tlmt/util.hpp"

namespace tlmt::agent {

using augment::ReplayBuffer;
using augment::Tag;
using product::DoneReason;

const char* mode_text(Mode m) {
    switch (m) {
        case Mode::Baseline: return "baseline";
        case Mode::Crm: return "crm";
        case Mode::Her: return "her";
        case Mode::CrmHer: return "crm_her";
    }
    return "?";
}

Mode mode_from_text(const std::string& s) {
    if (s == "baseline") return Mode::Baseline;
    if (s == "crm") return Mode::Crm;
    if (s == "her") return Mode::Her;
    if (s == "crm_her") return Mode::CrmHer;
    throw ConfigError("unknown mode '" + s + "' (expected baseline|crm|her|crm_her)");
}

// ── ActionGrid ──────────────────────────────────────────────────────────────

std::uint32_t ActionGrid::size() const {
    std::uint32_t n = 1;
    for (std::uint32_t d = 0; d < dims; ++d) n *= static_cast<std::uint32_t>(levels.size());
    return n;
}

std::vector<double> ActionGrid::action(std::uint32_t index) const {
    std::vector<double> a(dims);
    auto base = static_cast<std::uint32_t>(levels.size());
    for (std::uint32_t d = 0; d < dims; ++d) {
        a[d] = levels[index % base];
        index /= base;
    }
    return a;
}

std::uint32_t ActionGrid::index_of(const std::vector<double>& action) const {
    std::uint32_t index = 0;
    auto base = static_cast<std::uint32_t>(levels.size());
    for (std::uint32_t d = dims; d-- > 0;) {
        double v = d < action.size() ? action[d] : 0.0;
        std::uint32_t best = 0;
        double best_dist = std::fabs(levels[0] - v);
        for (std::uint32_t l = 1; l < base; ++l) {
            double dist = std::fabs(levels[l] - v);
            if (dist < best_dist) {
                best_dist = dist;
                best = l;
            }
        }
        index = index * base + best;
    }
    return index;
}

// ── QFunction ───────────────────────────────────────────────────────────────

QFunction::QFunction(TileCodingConfig tc, std::uint32_t num_q, std::uint32_t num_actions,
                     double alpha)
    : tc_(std::move(tc)), num_q_(num_q), num_actions_(num_actions), alpha_(alpha) {
    if (tc_.dims.size() != tc_.ranges.size()) {
        throw ConfigError("tile coding: dims and ranges must have the same length");
    }
    if (tc_.dims.empty()) throw ConfigError("tile coding: at least one dimension required");
    cells_per_tiling_ = 1;
    for (std::size_t d = 0; d < tc_.dims.size(); ++d) {
        cells_per_tiling_ *= tc_.tiles + 1;  // +1 cell per dim absorbs the tiling offsets
    }
    w_.assign(static_cast<std::size_t>(tc_.tilings) * cells_per_tiling_ * num_q_ * num_actions_,
              0.0);
}

void QFunction::active_tiles(const theory::VarAssignment& s,
                             std::vector<std::uint32_t>& out) const {
    out.resize(tc_.tilings);
    for (std::uint32_t t = 0; t < tc_.tilings; ++t) {
        std::uint32_t cell = 0;
        for (std::size_t d = 0; d < tc_.dims.size(); ++d) {
            auto [lo, hi] = tc_.ranges[d];
            double u = (s.at(tc_.dims[d]) - lo) / (hi - lo);
            u = std::min(std::max(u, 0.0), 1.0);
            // Per-tiling offsets use odd multipliers per dimension, the
            // usual trick to decorrelate the tilings.
            double phase = std::fmod(static_cast<double>(t) * (2.0 * d + 1.0) / tc_.tilings, 1.0);
            auto idx = static_cast<std::uint32_t>(u * tc_.tiles + phase);
            idx = std::min(idx, tc_.tiles);
            cell = cell * (tc_.tiles + 1) + idx;
        }
        out[t] = t * cells_per_tiling_ + cell;
    }
}

std::size_t QFunction::weight_index(std::uint32_t tile, std::uint32_t q, std::uint32_t a) const {
    return (static_cast<std::size_t>(tile) * num_q_ + q) * num_actions_ + a;
}

double QFunction::value(const std::vector<std::uint32_t>& tiles, std::uint32_t q,
                        std::uint32_t a) const {
    double v = 0.0;
    for (std::uint32_t tile : tiles) v += w_[weight_index(tile, q, a)];
    return v;
}

double QFunction::max_value(const std::vector<std::uint32_t>& tiles, std::uint32_t q) const {
    double best = value(tiles, q, 0);
    for (std::uint32_t a = 1; a < num_actions_; ++a) best = std::max(best, value(tiles, q, a));
    return best;
}

std::uint32_t QFunction::greedy(const std::vector<std::uint32_t>& tiles, std::uint32_t q) const {
    std::uint32_t best = 0;
    double best_v = value(tiles, q, 0);
    for (std::uint32_t a = 1; a < num_actions_; ++a) {
        double v = value(tiles, q, a);
        if (v > best_v) {
            best_v = v;
            best = a;
        }
    }
    return best;
}

void QFunction::update(const std::vector<std::uint32_t>& tiles, std::uint32_t q, std::uint32_t a,
                       double delta) {
    double step = alpha_ / tc_.tilings * delta;
    for (std::uint32_t tile : tiles) w_[weight_index(tile, q, a)] += step;
}

std::string QFunction::serialize() const {
    std::string out = "tlmtq1\n";
    out += std::to_string(tc_.tilings) + " " + std::to_string(tc_.tiles) + " " +
           std::to_string(tc_.dims.size()) + " " + std::to_string(num_q_) + " " +
           std::to_string(num_actions_) + " " + format_double(alpha_) + "\n";
    for (std::size_t d = 0; d < tc_.dims.size(); ++d) {
        out += std::to_string(tc_.dims[d]) + " " + format_double(tc_.ranges[d].first) + " " +
               format_double(tc_.ranges[d].second) + "\n";
    }
    out += std::to_string(w_.size()) + "\n";
    out.reserve(out.size() + w_.size() * 8);
    for (double v : w_) {
        char buf[8];
        std::memcpy(buf, &v, 8);
        out.append(buf, 8);
    }
    return out;
}

QFunction QFunction::deserialize(const std::string& blob) {
    std::istringstream in(blob);
    std::string magic;
    std::getline(in, magic);
    if (magic != "tlmtq1") throw ConfigError("weights file: bad magic");
    TileCodingConfig tc;
    std::size_t ndims = 0, nw = 0;
    std::uint32_t num_q = 0, num_actions = 0;
    double alpha = 0.0;
    in >> tc.tilings >> tc.tiles >> ndims >> num_q >> num_actions >> alpha;
    for (std::size_t d = 0; d < ndims; ++d) {
        std::uint32_t dim;
        double lo, hi;
        in >> dim >> lo >> hi;
        tc.dims.push_back(dim);
        tc.ranges.emplace_back(lo, hi);
    }
    in >> nw;
    in.get();  // newline before the raw weight block
    QFunction qf(tc, num_q, num_actions, alpha);
    if (qf.w_.size() != nw) throw ConfigError("weights file: size mismatch");
    auto offset = static_cast<std::size_t>(in.tellg());
    if (blob.size() < offset + nw * 8) throw ConfigError("weights file: truncated");
    for (std::size_t i = 0; i < nw; ++i) {
        std::memcpy(&qf.w_[i], blob.data() + offset + i * 8, 8);
    }
    return qf;
}

// ── act / td_update ─────────────────────────────────────────────────────────

std::uint32_t act(const QFunction& qf, const product::ProductState& ps, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && uniform01(rng) < epsilon) {
        return static_cast<std::uint32_t>(uniform_below(rng, qf.num_actions()));
    }
    std::vector<std::uint32_t> tiles;
    qf.active_tiles(ps.env_state, tiles);
    return qf.greedy(tiles, ps.q);
}

double td_update(QFunction& qf, const ActionGrid& grid,
                 const std::vector<augment::TaggedTransition>& batch, double gamma) {
    if (batch.empty()) throw EvalError("td_update: empty batch");
    std::vector<std::uint32_t> tiles_from, tiles_to;
    double total = 0.0;
    for (const auto& [tr, tag] : batch) {
        (void)tag;
        qf.active_tiles(tr.from.env_state, tiles_from);
        std::uint32_t a = grid.index_of(tr.action);
        double target = tr.reward;
        if (!tr.done) {
            qf.active_tiles(tr.to.env_state, tiles_to);
            target += gamma * qf.max_value(tiles_to, tr.to.q);
        }
        double delta = target - qf.value(tiles_from, tr.from.q, a);
        qf.update(tiles_from, tr.from.q, a, delta);
        total += delta;
    }
    return total / static_cast<double>(batch.size());
}

// ── Training loop ───────────────────────────────────────────────────────────

namespace {

double epsilon_at(const TrainSpec& spec, std::uint32_t episode) {
    double horizon = spec.epsilon_decay_fraction * spec.episodes;
    if (horizon <= 0.0) return spec.epsilon_end;
    double frac = std::min(1.0, static_cast<double>(episode) / horizon);
    return spec.epsilon_start + frac * (spec.epsilon_end - spec.epsilon_start);
}

// stream tags for derived rng seeds
constexpr std::uint64_t kActStream = 0x1;
constexpr std::uint64_t kEnvStream = 0x2;
constexpr std::uint64_t kSampleStream = 0x3;
constexpr std::uint64_t kEvalStream = 0x4;

}  // namespace

TrainResult train(const product::CompiledTask& task, envs::Env& env, const augment::GoalSpec& goal,
                  const TrainSpec& spec) {
    if ((spec.mode == Mode::Her || spec.mode == Mode::CrmHer) && goal.empty()) {
        throw ConfigError("mode '" + std::string(mode_text(spec.mode)) +
                          "' needs a non-empty goal_map");
    }
    ActionGrid grid = spec.actions;
    QFunction qf(spec.tiles, task.dfa.num_states(), grid.size(), spec.alpha);
    ReplayBuffer buffer(spec.buffer_capacity);
    Rng act_rng(mix_seed(spec.seed, kActStream));

    TrainResult result{{}, {}, qf, };
    std::uint64_t sample_counter = 0;

    for (std::uint32_t ep = 0; ep < spec.episodes; ++ep) {
        double eps = epsilon_at(spec, ep);
        product::Episode episode(task, env, spec.max_steps);
        product::ProductState ps = episode.reset(mix_seed(spec.seed, kEnvStream + 31 * ep));

        product::Trajectory traj;
        traj.initial_q = task.dfa.initial;
        traj.q_after_reset = ps.q;
        traj.states.push_back(ps.env_state);

        double ep_return = 0.0;
        while (!episode.done()) {
            std::uint32_t a_idx = act(result.qf, episode.current(), eps, act_rng);
            product::ProductTransition tr = episode.step(grid.action(a_idx));
            ep_return += tr.reward;
            traj.states.push_back(tr.to.env_state);

            switch (spec.mode) {
                case Mode::Baseline:
                case Mode::Her:
                case Mode::CrmHer: buffer.push(tr, Tag::Real); break;
                case Mode::Crm: {
                    auto copies = augment::crm_expand(task, tr);
                    for (auto& copy : copies) {
                        Tag tag = copy.from.q == tr.from.q ? Tag::Real : Tag::Crm;
                        buffer.push(std::move(copy), tag);
                    }
                    break;
                }
            }
            traj.transitions.push_back(std::move(tr));

            for (std::uint32_t u = 0; u < spec.updates_per_step; ++u) {
                auto batch = buffer.sample(spec.batch_size,
                                           mix_seed(spec.seed, kSampleStream + sample_counter++));
                td_update(result.qf, grid, batch, spec.gamma);
            }
        }
        traj.end_reason = episode.reason();

        if (spec.mode == Mode::Her) {
            buffer.push_trajectory(augment::her_relabel(task, traj, goal), Tag::Her);
        } else if (spec.mode == Mode::CrmHer) {
            auto artificial = augment::crm_her_expand(task, traj, goal);
            for (std::size_t i = 0; i < artificial.size(); ++i) {
                Tag tag = i < task.dfa.num_states() ? Tag::Crm : Tag::Her;
                buffer.push_trajectory(artificial[i], tag);
            }
        }

        EpisodeRow row;
        row.seed = spec.seed;
        row.episode = ep;
        row.steps = episode.steps_taken();
        row.episode_return = ep_return;
        row.success = traj.success();
        row.mode = spec.mode;
        row.buffer_real = buffer.census().real;
        row.buffer_crm = buffer.census().crm;
        row.buffer_her = buffer.census().her;
        result.episodes.push_back(row);

        if (spec.eval_period > 0 && (ep + 1) % spec.eval_period == 0) {
            for (std::uint32_t k = 0; k < spec.eval_episodes; ++k) {
                product::Episode ev(task, env, spec.max_steps);
                ev.reset(mix_seed(spec.seed, kEvalStream + 131 * (ep + 1ull) + k));
                std::vector<std::uint32_t> tiles;
                while (!ev.done()) {
                    result.qf.active_tiles(ev.current().env_state, tiles);
                    std::uint32_t a = result.qf.greedy(tiles, ev.current().q);
                    ev.step(grid.action(a));
                }
                EvalRow er;
                er.seed = spec.seed;
                er.train_episode = ep + 1;
                er.eval_episode = k;
                er.steps = ev.steps_taken();
                er.success = ev.reason() == product::DoneReason::Accepted;
                result.evals.push_back(er);
            }
        }
    }
    return result;
}

double evaluate(const product::CompiledTask& task, envs::Env& env, const QFunction& qf,
                const ActionGrid& grid, std::uint32_t n_episodes, std::uint32_t max_steps,
                std::uint64_t seed) {
    if (n_episodes == 0) return 0.0;
    std::uint32_t successes = 0;
    std::vector<std::uint32_t> tiles;
    for (std::uint32_t k = 0; k < n_episodes; ++k) {
        product::Episode ev(task, env, max_steps);
        ev.reset(mix_seed(seed, kEvalStream + k));
        while (!ev.done()) {
            qf.active_tiles(ev.current().env_state, tiles);
            ev.step(grid.action(qf.greedy(tiles, ev.current().q)));
        }
        if (ev.reason() == product::DoneReason::Accepted) ++successes;
    }
    return static_cast<double>(successes) / n_episodes;
}

double TrainResult::final_eval_success(std::size_t window) const {
    if (evals.empty()) return 0.0;
    std::size_t n = std::min(window, evals.size());
    double sum = 0.0;
    for (std::size_t i = evals.size() - n; i < evals.size(); ++i) {
        sum += evals[i].success ? 1.0 : 0.0;
    }
    return sum / static_cast<double>(n);
}

// ── CSV ─────────────────────────────────────────────────────────────────────

std::string metrics_to_csv(const std::vector<EpisodeRow>& rows) {
    std::string out = "seed,episode,steps,return,success,mode,buffer_real,buffer_crm,buffer_her\n";
    for (const auto& r : rows) {
        out += std::to_string(r.seed);
        out += "," + std::to_string(r.episode);
        out += "," + std::to_string(r.steps);
        out += "," + format_double(r.episode_return);
        out += ",";
        out += r.success ? "1" : "0";
        out += ",";
        out += mode_text(r.mode);
        out += "," + std::to_string(r.buffer_real);
        out += "," + std::to_string(r.buffer_crm);
        out += "," + std::to_string(r.buffer_her);
        out += "\n";
    }
    return out;
}

std::string evals_to_csv(const std::vector<EvalRow>& rows) {
    std::string out = "seed,train_episode,eval_episode,steps,success\n";
    for (const auto& r : rows) {
        out += std::to_string(r.seed);
        out += "," + std::to_string(r.train_episode);
        out += "," + std::to_string(r.eval_episode);
        out += "," + std::to_string(r.steps);
        out += ",";
        out += r.success ? "1" : "0";
        out += "\n";
    }
    return out;
}

}  // namespace tlmt::agent
