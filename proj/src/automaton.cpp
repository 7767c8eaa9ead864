#include "tlmt/automaton.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tlmt/util.hpp"

namespace tlmt::automaton {

using prop::FormulaId;
using prop::Kind;

std::vector<std::uint32_t> Dfa::accepting_ids() const {
    std::vector<std::uint32_t> ids;
    for (std::uint32_t q = 0; q < accepting.size(); ++q) {
        if (accepting[q]) ids.push_back(q);
    }
    return ids;
}

// ── ltlf_eval ───────────────────────────────────────────────────────────────

bool ltlf_eval(const prop::Factory& factory, FormulaId phi, const PropTrace& trace,
               std::size_t t) {
    if (trace.empty()) throw EvalError("ltlf_eval: empty trace");
    if (t >= trace.size()) throw EvalError("ltlf_eval: position out of range");
    const prop::Node& n = factory.node(phi);
    switch (n.kind) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::Letter: return (trace[t] >> n.letter) & 1u;
        case Kind::NotLetter: return !((trace[t] >> n.letter) & 1u);
        case Kind::And:
            for (FormulaId c : n.children) {
                if (!ltlf_eval(factory, c, trace, t)) return false;
            }
            return true;
        case Kind::Or:
            for (FormulaId c : n.children) {
                if (ltlf_eval(factory, c, trace, t)) return true;
            }
            return false;
        case Kind::Next:
            return t + 1 < trace.size() && ltlf_eval(factory, n.children[0], trace, t + 1);
        case Kind::WeakNext:
            return t + 1 >= trace.size() || ltlf_eval(factory, n.children[0], trace, t + 1);
        case Kind::Until:
            for (std::size_t j = t; j < trace.size(); ++j) {
                if (ltlf_eval(factory, n.children[1], trace, j)) return true;
                if (!ltlf_eval(factory, n.children[0], trace, j)) return false;
            }
            return false;
        case Kind::Eventually:
            for (std::size_t j = t; j < trace.size(); ++j) {
                if (ltlf_eval(factory, n.children[0], trace, j)) return true;
            }
            return false;
        case Kind::Always:
            for (std::size_t j = t; j < trace.size(); ++j) {
                if (!ltlf_eval(factory, n.children[0], trace, j)) return false;
            }
            return true;
    }
    return false;
}

// ── ltlfmt_eval ─────────────────────────────────────────────────────────────

bool ltlfmt_eval(const syntax::PhiPtr& phi, std::span<const theory::VarAssignment> trace,
                 const theory::ConstAssignment& kappa, std::size_t t) {
    if (trace.empty()) throw EvalError("ltlfmt_eval: empty trace");
    if (t >= trace.size()) throw EvalError("ltlfmt_eval: position out of range");
    using syntax::PhiKind;
    switch (phi->kind) {
        case PhiKind::True: return true;
        case PhiKind::False: return false;
        case PhiKind::Lambda: return theory::eval_lambda(phi->lam, trace[t], kappa);
        case PhiKind::And:
            return ltlfmt_eval(phi->lhs, trace, kappa, t) && ltlfmt_eval(phi->rhs, trace, kappa, t);
        case PhiKind::Or:
            return ltlfmt_eval(phi->lhs, trace, kappa, t) || ltlfmt_eval(phi->rhs, trace, kappa, t);
        case PhiKind::Next:
            return t + 1 < trace.size() && ltlfmt_eval(phi->lhs, trace, kappa, t + 1);
        case PhiKind::WeakNext:
            return t + 1 >= trace.size() || ltlfmt_eval(phi->lhs, trace, kappa, t + 1);
        case PhiKind::Until:
            for (std::size_t j = t; j < trace.size(); ++j) {
                if (ltlfmt_eval(phi->rhs, trace, kappa, j)) return true;
                if (!ltlfmt_eval(phi->lhs, trace, kappa, j)) return false;
            }
            return false;
        case PhiKind::Eventually:
            for (std::size_t j = t; j < trace.size(); ++j) {
                if (ltlfmt_eval(phi->lhs, trace, kappa, j)) return true;
            }
            return false;
        case PhiKind::Always:
            for (std::size_t j = t; j < trace.size(); ++j) {
                if (!ltlfmt_eval(phi->lhs, trace, kappa, j)) return false;
            }
            return true;
    }
    return false;
}

// ── Progression ─────────────────────────────────────────────────────────────

FormulaId progress(prop::Factory& factory, FormulaId psi, Bitmask nu) {
    const prop::Node n = factory.node(psi);  // copy: factory may reallocate
    switch (n.kind) {
        case Kind::True: return factory.true_id();
        case Kind::False: return factory.false_id();
        case Kind::Letter: return factory.truth((nu >> n.letter) & 1u);
        case Kind::NotLetter: return factory.truth(!((nu >> n.letter) & 1u));
        case Kind::And: {
            std::vector<FormulaId> out;
            out.reserve(n.children.size());
            for (FormulaId c : n.children) out.push_back(progress(factory, c, nu));
            return factory.make_and(std::move(out));
        }
        case Kind::Or: {
            std::vector<FormulaId> out;
            out.reserve(n.children.size());
            for (FormulaId c : n.children) out.push_back(progress(factory, c, nu));
            return factory.make_or(std::move(out));
        }
        case Kind::Next:
        case Kind::WeakNext:
            // Both discharge to the bare obligation on the suffix; they differ
            // only at the end of the trace, which empty_suffix_accepts handles.
            return n.children[0];
        case Kind::Until:
            // a U b  ->  progress(b) || (progress(a) && a U b)
            return factory.make_or(
                progress(factory, n.children[1], nu),
                factory.make_and(progress(factory, n.children[0], nu), psi));
        case Kind::Eventually:
            return factory.make_or(progress(factory, n.children[0], nu), psi);
        case Kind::Always:
            return factory.make_and(progress(factory, n.children[0], nu), psi);
    }
    return factory.false_id();
}

bool empty_suffix_accepts(const prop::Factory& factory, FormulaId psi) {
    const prop::Node& n = factory.node(psi);
    switch (n.kind) {
        case Kind::True: return true;
        case Kind::False: return false;
        // A letter surviving to the end of the trace is an undischarged
        // obligation. Progression always resolves letters, so this arises
        // only when the initial formula itself is evaluated on the empty
        // suffix.
        case Kind::Letter:
        case Kind::NotLetter: return false;
        case Kind::And:
            for (FormulaId c : n.children) {
                if (!empty_suffix_accepts(factory, c)) return false;
            }
            return true;
        case Kind::Or:
            for (FormulaId c : n.children) {
                if (empty_suffix_accepts(factory, c)) return true;
            }
            return false;
        case Kind::Next: return false;
        case Kind::WeakNext: return true;
        case Kind::Until: return false;
        case Kind::Eventually: return false;
        case Kind::Always: return true;
    }
    return false;
}

bool accepts_as_last(const prop::Factory& factory, FormulaId psi, Bitmask nu) {
    const prop::Node& n = factory.node(psi);
    switch (n.kind) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::Letter: return (nu >> n.letter) & 1u;
        case Kind::NotLetter: return !((nu >> n.letter) & 1u);
        case Kind::And:
            for (FormulaId c : n.children) {
                if (!accepts_as_last(factory, c, nu)) return false;
            }
            return true;
        case Kind::Or:
            for (FormulaId c : n.children) {
                if (accepts_as_last(factory, c, nu)) return true;
            }
            return false;
        case Kind::Next: return false;
        case Kind::WeakNext: return true;
        case Kind::Until: return accepts_as_last(factory, n.children[1], nu);
        case Kind::Eventually:
        case Kind::Always: return accepts_as_last(factory, n.children[0], nu);
    }
    return false;
}

// ── Compilation ─────────────────────────────────────────────────────────────

namespace {

// Residuals must be Boolean combinations of subformulas of phi' (plus
// true/false). Checked during BFS when closure_check is on.
void collect_closure(const prop::Factory& factory, FormulaId f,
                     std::unordered_set<FormulaId>& out) {
    if (!out.insert(f).second) return;
    for (FormulaId c : factory.node(f).children) collect_closure(factory, c, out);
}

bool in_closure(const prop::Factory& factory, FormulaId f,
                const std::unordered_set<FormulaId>& closure) {
    if (closure.count(f)) return true;
    const prop::Node& n = factory.node(f);
    if (n.kind == Kind::True || n.kind == Kind::False) return true;
    if (n.kind == Kind::And || n.kind == Kind::Or) {
        for (FormulaId c : n.children) {
            if (!in_closure(factory, c, closure)) return false;
        }
        return true;
    }
    return false;
}

}  // namespace

Dfa compile(prop::Factory& factory, FormulaId phi_prime, std::uint32_t num_letters,
            const CompileOptions& options) {
    if (num_letters >= abstraction::kMaxLetters) {
        throw CompileError("alphabet too large: " + std::to_string(num_letters) + " letters");
    }
    std::unordered_set<FormulaId> closure;
    if (options.closure_check) collect_closure(factory, phi_prime, closure);

    const std::uint32_t sigma = 1u << num_letters;
    Dfa d;
    d.num_letters = num_letters;
    d.initial = 0;

    // A state is (residual formula, accepts-empty-remainder). The bit is the
    // carry-over of weak/strong next obligations discharged on the symbol
    // just consumed; the residual alone cannot express it.
    using State = std::pair<FormulaId, bool>;
    struct StateHash {
        std::size_t operator()(const State& s) const {
            return s.first * 2654435761u + (s.second ? 1 : 0);
        }
    };

    State init{phi_prime, empty_suffix_accepts(factory, phi_prime)};
    std::unordered_map<State, std::uint32_t, StateHash> state_of{{init, 0}};
    std::vector<State> states{init};
    std::deque<std::uint32_t> frontier{0};

    d.residuals.push_back(factory.to_string(phi_prime));
    d.accepting.push_back(init.second ? 1 : 0);
    d.delta.emplace_back(sigma, 0u);

    while (!frontier.empty()) {
        std::uint32_t q = frontier.front();
        frontier.pop_front();
        FormulaId psi = states[q].first;
        for (Bitmask nu = 0; nu < sigma; ++nu) {
            State next{progress(factory, psi, nu), accepts_as_last(factory, psi, nu)};
            if (options.closure_check && !in_closure(factory, next.first, closure)) {
                throw CompileError("progression escaped the subformula closure: " +
                                   factory.to_string(next.first));
            }
            auto it = state_of.find(next);
            std::uint32_t target;
            if (it == state_of.end()) {
                target = static_cast<std::uint32_t>(states.size());
                if (target >= options.state_cap) {
                    throw CompileError("DFA construction exceeded the state cap of " +
                                       std::to_string(options.state_cap) + " states");
                }
                state_of.emplace(next, target);
                states.push_back(next);
                frontier.push_back(target);
                d.residuals.push_back(factory.to_string(next.first));
                d.accepting.push_back(next.second ? 1 : 0);
                d.delta.emplace_back(sigma, 0u);
            } else {
                target = it->second;
            }
            d.delta[q][nu] = target;
        }
    }
    d.pre_minimization_states = d.num_states();
    return d;
}

// ── Minimization ────────────────────────────────────────────────────────────

Dfa minimize(const Dfa& d) {
    const std::uint32_t n = d.num_states();
    const std::uint32_t sigma = d.alphabet_size();

    // Moore's partition refinement: start from accepting/rejecting, split by
    // transition signatures until stable. Quadratic worst case, fine at our
    // automaton sizes.
    std::vector<std::uint32_t> cls(n);
    for (std::uint32_t q = 0; q < n; ++q) cls[q] = d.accepting[q] ? 1 : 0;

    struct VecHash {
        std::size_t operator()(const std::vector<std::uint32_t>& v) const {
            std::size_t h = 1469598103934665603ull;
            for (std::uint32_t x : v) h = (h ^ x) * 1099511628211ull;
            return h;
        }
    };

    // classes only ever split; a pass that keeps the count is the fixpoint
    std::size_t prev_count = 1 + (n && *std::max_element(cls.begin(), cls.end()));
    while (true) {
        std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VecHash> sig_to_class;
        sig_to_class.reserve(n);
        std::vector<std::uint32_t> next_cls(n);
        std::vector<std::uint32_t> sig(sigma + 1);
        for (std::uint32_t q = 0; q < n; ++q) {
            sig[0] = cls[q];
            for (Bitmask nu = 0; nu < sigma; ++nu) sig[nu + 1] = cls[d.delta[q][nu]];
            auto [it, inserted] =
                sig_to_class.emplace(sig, static_cast<std::uint32_t>(sig_to_class.size()));
            next_cls[q] = it->second;
            (void)inserted;
        }
        std::size_t count = sig_to_class.size();
        cls = std::move(next_cls);
        if (count == prev_count) break;
        prev_count = count;
    }

    // Renumber classes so the initial state is 0 and ids follow a BFS over
    // class representatives (deterministic output).
    std::uint32_t num_classes = *std::max_element(cls.begin(), cls.end()) + 1;
    std::vector<std::uint32_t> rep(num_classes, UINT32_MAX);
    for (std::uint32_t q = 0; q < n; ++q) {
        if (rep[cls[q]] == UINT32_MAX) rep[cls[q]] = q;
    }
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> new_id(num_classes, UINT32_MAX);
    std::deque<std::uint32_t> bfs{cls[d.initial]};
    new_id[cls[d.initial]] = 0;
    order.push_back(cls[d.initial]);
    while (!bfs.empty()) {
        std::uint32_t c = bfs.front();
        bfs.pop_front();
        std::uint32_t q = rep[c];
        for (Bitmask nu = 0; nu < sigma; ++nu) {
            std::uint32_t tc = cls[d.delta[q][nu]];
            if (new_id[tc] == UINT32_MAX) {
                new_id[tc] = static_cast<std::uint32_t>(order.size());
                order.push_back(tc);
                bfs.push_back(tc);
            }
        }
    }

    Dfa m;
    m.num_letters = d.num_letters;
    m.initial = 0;
    m.pre_minimization_states = d.pre_minimization_states ? d.pre_minimization_states : n;
    m.residuals.resize(order.size());
    m.accepting.resize(order.size());
    m.delta.assign(order.size(), std::vector<std::uint32_t>(sigma, 0u));
    for (std::uint32_t i = 0; i < order.size(); ++i) {
        std::uint32_t q = rep[order[i]];
        m.residuals[i] = d.residuals[q];
        m.accepting[i] = d.accepting[q];
        for (Bitmask nu = 0; nu < sigma; ++nu) m.delta[i][nu] = new_id[cls[d.delta[q][nu]]];
    }
    return m;
}

// ── Running ─────────────────────────────────────────────────────────────────

RunResult run(const Dfa& d, const PropTrace& trace) {
    RunResult res;
    std::uint32_t q = d.initial;
    if (trace.empty()) {
        res.final_state = q;
        res.accepted = d.is_accepting(q);
        if (res.accepted) res.first_accept_index = 0;
        return res;
    }
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace[i] >= d.alphabet_size()) {
            throw EvalError("trace symbol has bits outside the letter table (width mismatch)");
        }
        q = d.step(q, trace[i]);
        if (!res.first_accept_index && d.is_accepting(q)) res.first_accept_index = i;
    }
    res.final_state = q;
    res.accepted = d.is_accepting(q);
    return res;
}

// ── Serialization ───────────────────────────────────────────────────────────

std::string dfa_to_json(const Dfa& d, const abstraction::LetterTable& table) {
    nlohmann::json j;
    j["letters"] = nlohmann::json::array();
    for (const auto& e : table.entries) {
        j["letters"].push_back({{"name", e.name}, {"formula", syntax::print_lambda(e.payload)}});
    }
    j["num_states"] = d.num_states();
    j["initial"] = d.initial;
    j["accepting"] = d.accepting_ids();
    j["transitions"] = nlohmann::json::array();
    for (std::uint32_t q = 0; q < d.num_states(); ++q) {
        for (Bitmask nu = 0; nu < d.alphabet_size(); ++nu) {
            j["transitions"].push_back({{"from", q}, {"on", nu}, {"to", d.delta[q][nu]}});
        }
    }
    if (d.pre_minimization_states) j["pre_minimization_states"] = d.pre_minimization_states;
    return j.dump(2) + "\n";
}

std::pair<Dfa, abstraction::LetterTable> dfa_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    abstraction::LetterTable table;
    for (const auto& l : j.at("letters")) {
        syntax::LambdaPtr payload = syntax::parse_lambda(l.at("formula").get<std::string>());
        table.index_by_key.emplace(syntax::normal_key(payload),
                                   static_cast<std::uint32_t>(table.entries.size()));
        table.entries.push_back({l.at("name").get<std::string>(), std::move(payload)});
    }
    Dfa d;
    d.num_letters = table.size();
    d.initial = j.at("initial").get<std::uint32_t>();
    auto n = j.at("num_states").get<std::uint32_t>();
    d.residuals.assign(n, "");
    d.accepting.assign(n, 0);
    for (const auto& a : j.at("accepting")) d.accepting.at(a.get<std::uint32_t>()) = 1;
    d.delta.assign(n, std::vector<std::uint32_t>(d.alphabet_size(), UINT32_MAX));
    for (const auto& t : j.at("transitions")) {
        d.delta.at(t.at("from").get<std::uint32_t>()).at(t.at("on").get<Bitmask>()) =
            t.at("to").get<std::uint32_t>();
    }
    for (const auto& row : d.delta) {
        for (std::uint32_t target : row) {
            if (target == UINT32_MAX || target >= n) {
                throw ConfigError("DFA JSON: transition table is not total");
            }
        }
    }
    if (j.contains("pre_minimization_states")) {
        d.pre_minimization_states = j["pre_minimization_states"].get<std::uint32_t>();
    }
    return {std::move(d), std::move(table)};
}

namespace {

std::string assignment_label(Bitmask nu, const abstraction::LetterTable& table) {
    std::string s = "{";
    bool first = true;
    for (std::uint32_t i = 0; i < table.size(); ++i) {
        if ((nu >> i) & 1u) {
            if (!first) s += ",";
            s += table.entries[i].name;
            first = false;
        }
    }
    return s + "}";
}

}  // namespace

std::string dfa_to_dot(const Dfa& d, const abstraction::LetterTable& table) {
    std::string out = "digraph dfa {\n  rankdir=LR;\n  node [shape=circle];\n";
    out += "  init [shape=point];\n";
    for (std::uint32_t q = 0; q < d.num_states(); ++q) {
        out += "  q" + std::to_string(q);
        out += d.is_accepting(q) ? " [shape=doublecircle" : " [shape=circle";
        out += ", label=\"q" + std::to_string(q) + "\"];\n";
    }
    out += "  init -> q" + std::to_string(d.initial) + ";\n";
    for (std::uint32_t q = 0; q < d.num_states(); ++q) {
        // group parallel edges by target
        std::map<std::uint32_t, std::vector<Bitmask>> by_target;
        for (Bitmask nu = 0; nu < d.alphabet_size(); ++nu) {
            by_target[d.delta[q][nu]].push_back(nu);
        }
        for (const auto& [target, symbols] : by_target) {
            std::string label;
            for (std::size_t i = 0; i < symbols.size(); ++i) {
                if (i) label += " ";
                label += assignment_label(symbols[i], table);
            }
            out += "  q" + std::to_string(q) + " -> q" + std::to_string(target) + " [label=\"" +
                   label + "\"];\n";
        }
    }
    out += "}\n";
    return out;
}

}  // namespace tlmt::automaton
