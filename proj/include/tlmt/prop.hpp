#pragma once

// Interned AST for propositional LTLf formulas (the phi' produced by
// abstraction) and for the residuals of the progression-based DFA
// construction. Structurally identical formulas share one id, so equality
// is O(1) and residual memoization keys are just ids.
//
// And/Or are n-ary and canonical by construction: children flattened,
// sorted by id, deduplicated; identity/annihilator elements dropped;
// absorption applied. This is deliberately not full Boolean canonicity —
// minimization at the DFA level repairs what it misses.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace tlmt::prop {

using FormulaId = std::uint32_t;

enum class Kind : std::uint8_t {
    True,
    False,
    Letter,
    NotLetter,
    And,
    Or,
    Next,
    WeakNext,
    Until,
    Eventually,
    Always,
};

struct Node {
    Kind kind{};
    std::uint32_t letter = 0;          // Letter / NotLetter
    std::vector<FormulaId> children;   // And/Or: sorted, unique; unary: 1; Until: 2

    bool operator==(const Node& o) const {
        return kind == o.kind && letter == o.letter && children == o.children;
    }
};

struct NodeHash {
    std::size_t operator()(const Node& n) const;
};

class Factory {
  public:
    Factory();

    FormulaId truth(bool b) const { return b ? true_id() : false_id(); }
    FormulaId true_id() const { return 0; }
    FormulaId false_id() const { return 1; }

    FormulaId letter(std::uint32_t index);
    FormulaId not_letter(std::uint32_t index);

    FormulaId make_and(std::vector<FormulaId> children);
    FormulaId make_or(std::vector<FormulaId> children);
    FormulaId make_and(FormulaId a, FormulaId b) { return make_and(std::vector<FormulaId>{a, b}); }
    FormulaId make_or(FormulaId a, FormulaId b) { return make_or(std::vector<FormulaId>{a, b}); }

    FormulaId next(FormulaId f);
    FormulaId weak_next(FormulaId f);
    FormulaId until(FormulaId a, FormulaId b);
    FormulaId eventually(FormulaId f);
    FormulaId always(FormulaId f);

    const Node& node(FormulaId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }

    // Letter names are "p0", "p1", ...
    std::string to_string(FormulaId id) const;

  private:
    FormulaId intern(Node n);

    std::vector<Node> nodes_;
    std::unordered_map<Node, FormulaId, NodeHash> intern_;
};

}  // namespace tlmt::prop
