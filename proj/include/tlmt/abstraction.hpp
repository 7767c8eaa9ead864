#pragma once

// Propositionalization: swap every first-order atom for a propositional
// letter (syntactically identical atoms, after normalization, share one),
// and turn numeric traces into propositional traces by evaluating the
// letter payloads on each state.

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlmt/prop.hpp"
#include "tlmt/syntax.hpp"
#include "tlmt/theory.hpp"

namespace tlmt::abstraction {

// Truth assignment over the letter table; bit i = letter i.
using Bitmask = std::uint32_t;
using PropTrace = std::vector<Bitmask>;

// Letters above this would make the 2^|P| DFA transition tables explode
// long before the state cap triggers.
inline constexpr std::uint32_t kMaxLetters = 20;

struct LetterTable {
    struct Entry {
        std::string name;             // "p0", "p1", ... in first-occurrence order
        syntax::LambdaPtr payload;    // the atom this letter stands for
    };
    std::vector<Entry> entries;
    std::unordered_map<std::string, std::uint32_t> index_by_key;  // normal_key -> letter

    std::uint32_t size() const { return static_cast<std::uint32_t>(entries.size()); }

    // Letter table with goal constants replaced by literals in every
    // payload: the HER relabeling mechanism. The automaton is untouched;
    // only the labeling function changes.
    LetterTable with_constants(const theory::ConstAssignment& delta) const;
};

struct AbstractionResult {
    prop::FormulaId formula;
    LetterTable table;
};

// phi must be resolved. Every atom becomes a letter; the Boolean and
// temporal structure is carried over unchanged.
AbstractionResult abstract_formula(const syntax::PhiPtr& phi, prop::Factory& factory);

Bitmask label_state(const LetterTable& table, const theory::VarAssignment& mu,
                    const theory::ConstAssignment& kappa);

PropTrace abstract_trace(const LetterTable& table, std::span<const theory::VarAssignment> trace,
                         const theory::ConstAssignment& kappa);

// Counts label_state invocations (per thread); lets tests assert the
// one-evaluation-per-step cost model of counterfactual expansion.
struct LabelStats {
    static thread_local std::uint64_t label_calls;
};

}  // namespace tlmt::abstraction
