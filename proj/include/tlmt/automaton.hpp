#pragma once

// LTLf finite-trace semantics (the brute-force oracle for everything
// downstream), progression-based DFA compilation, partition-refinement
// minimization, and DFA serialization (JSON + DOT).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlmt/abstraction.hpp"
#include "tlmt/prop.hpp"
#include "tlmt/syntax.hpp"
#include "tlmt/theory.hpp"

namespace tlmt::automaton {

using abstraction::Bitmask;
using abstraction::PropTrace;

// ── DFA ─────────────────────────────────────────────────────────────────────

// Complete DFA over the alphabet 2^P. delta is dense: delta[q][nu] for all
// nu < 2^num_letters. Each state keeps the printed canonical residual it
// was built from, for debugging and DOT output.
struct Dfa {
    std::uint32_t num_letters = 0;
    std::uint32_t initial = 0;
    std::vector<std::string> residuals;          // one per state
    std::vector<std::uint8_t> accepting;         // one per state, 0/1
    std::vector<std::vector<std::uint32_t>> delta;
    std::uint32_t pre_minimization_states = 0;   // 0 = not minimized

    std::uint32_t num_states() const { return static_cast<std::uint32_t>(delta.size()); }
    std::uint32_t alphabet_size() const { return 1u << num_letters; }
    std::uint32_t step(std::uint32_t q, Bitmask nu) const { return delta[q][nu]; }
    bool is_accepting(std::uint32_t q) const { return accepting[q] != 0; }
    std::vector<std::uint32_t> accepting_ids() const;
};

struct RunResult {
    std::uint32_t final_state = 0;
    bool accepted = false;
    // Index of the earliest trace element after which the automaton sits in
    // an accepting state; 0 for an empty trace accepted at the initial state.
    std::optional<std::size_t> first_accept_index;
};

// ── Semantics oracles ───────────────────────────────────────────────────────

// Direct recursive LTLf semantics on a propositional trace. X fails at the
// last position, WX holds there, U needs its witness inside the trace.
// Rejects empty traces.
bool ltlf_eval(const prop::Factory& factory, prop::FormulaId phi, const PropTrace& trace,
               std::size_t t);

// Direct temporal evaluation of a resolved first-order formula on a numeric
// trace — no abstraction, no automaton. The cross-check entry point.
bool ltlfmt_eval(const syntax::PhiPtr& phi, std::span<const theory::VarAssignment> trace,
                 const theory::ConstAssignment& kappa, std::size_t t);

// ── Progression ─────────────────────────────────────────────────────────────

// One step of formula progression: resolve letters against nu and rewrite
// temporal operators into their obligation on the remaining suffix.
prop::FormulaId progress(prop::Factory& factory, prop::FormulaId psi, Bitmask nu);

// Whether the residual is satisfied by the empty suffix (end of trace).
bool empty_suffix_accepts(const prop::Factory& factory, prop::FormulaId psi);

// Whether psi holds on the single-symbol trace [nu]. This is the acceptance
// bit of the successor state when nu turns out to be the last symbol: the
// bare residual cannot carry it (progressing "WX p" and "X p" both leave
// "p", yet only the weak one is satisfied when the trace stops).
bool accepts_as_last(const prop::Factory& factory, prop::FormulaId psi, Bitmask nu);

struct CompileOptions {
    std::uint32_t state_cap = 4096;
    bool closure_check = true;  // assert residuals stay inside the subformula closure
};

Dfa compile(prop::Factory& factory, prop::FormulaId phi_prime, std::uint32_t num_letters,
            const CompileOptions& options = {});

// Language-preserving minimization by partition refinement; residual
// annotations are carried from an arbitrary representative.
Dfa minimize(const Dfa& d);

RunResult run(const Dfa& d, const PropTrace& trace);

// ── Serialization ───────────────────────────────────────────────────────────

std::string dfa_to_json(const Dfa& d, const abstraction::LetterTable& table);
// Parses the JSON produced above. Letter payload text is reparsed; the
// returned table is unresolved (resolve against a signature before labeling).
std::pair<Dfa, abstraction::LetterTable> dfa_from_json(const std::string& json_text);

std::string dfa_to_dot(const Dfa& d, const abstraction::LetterTable& table);

}  // namespace tlmt::automaton
