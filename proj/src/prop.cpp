#include "tlmt/prop.hpp"

#include <algorithm>

namespace tlmt::prop {

std::size_t NodeHash::operator()(const Node& n) const {
    std::size_t h = static_cast<std::size_t>(n.kind) * 0x9e3779b97f4a7c15ULL + n.letter;
    for (FormulaId c : n.children) {
        h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

Factory::Factory() {
    // ids 0 and 1 are reserved for true / false
    Node t;
    t.kind = Kind::True;
    nodes_.push_back(t);
    intern_[t] = 0;
    Node f;
    f.kind = Kind::False;
    nodes_.push_back(f);
    intern_[f] = 1;
}

FormulaId Factory::intern(Node n) {
    auto it = intern_.find(n);
    if (it != intern_.end()) return it->second;
    auto id = static_cast<FormulaId>(nodes_.size());
    nodes_.push_back(n);
    intern_.emplace(std::move(n), id);
    return id;
}

FormulaId Factory::letter(std::uint32_t index) {
    Node n;
    n.kind = Kind::Letter;
    n.letter = index;
    return intern(std::move(n));
}

FormulaId Factory::not_letter(std::uint32_t index) {
    Node n;
    n.kind = Kind::NotLetter;
    n.letter = index;
    return intern(std::move(n));
}

namespace {

// In an And, an Or-child that contains another conjunct is redundant
// (a && (a || b) == a); dually for Or. `sub` is the composite child's
// sorted child list, `siblings` the sorted sibling list.
bool contains_any(const std::vector<FormulaId>& sub, const std::vector<FormulaId>& siblings,
                  FormulaId self) {
    for (FormulaId s : siblings) {
        if (s == self) continue;
        if (std::binary_search(sub.begin(), sub.end(), s)) return true;
    }
    return false;
}

}  // namespace

FormulaId Factory::make_and(std::vector<FormulaId> children) {
    // flatten nested Ands, drop true, annihilate on false
    std::vector<FormulaId> flat;
    for (FormulaId c : children) {
        const Node& n = node(c);
        if (n.kind == Kind::True) continue;
        if (n.kind == Kind::False) return false_id();
        if (n.kind == Kind::And) {
            flat.insert(flat.end(), n.children.begin(), n.children.end());
        } else {
            flat.push_back(c);
        }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    // absorption: drop Or-children that contain a sibling
    std::vector<FormulaId> kept;
    for (FormulaId c : flat) {
        const Node& n = node(c);
        if (n.kind == Kind::Or && contains_any(n.children, flat, c)) continue;
        kept.push_back(c);
    }
    if (kept.empty()) return true_id();
    if (kept.size() == 1) return kept[0];
    Node n;
    n.kind = Kind::And;
    n.children = std::move(kept);
    return intern(std::move(n));
}

FormulaId Factory::make_or(std::vector<FormulaId> children) {
    std::vector<FormulaId> flat;
    for (FormulaId c : children) {
        const Node& n = node(c);
        if (n.kind == Kind::False) continue;
        if (n.kind == Kind::True) return true_id();
        if (n.kind == Kind::Or) {
            flat.insert(flat.end(), n.children.begin(), n.children.end());
        } else {
            flat.push_back(c);
        }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    std::vector<FormulaId> kept;
    for (FormulaId c : flat) {
        const Node& n = node(c);
        if (n.kind == Kind::And && contains_any(n.children, flat, c)) continue;
        kept.push_back(c);
    }
    if (kept.empty()) return false_id();
    if (kept.size() == 1) return kept[0];
    Node n;
    n.kind = Kind::Or;
    n.children = std::move(kept);
    return intern(std::move(n));
}

FormulaId Factory::next(FormulaId f) {
    Node n;
    n.kind = Kind::Next;
    n.children = {f};
    return intern(std::move(n));
}

FormulaId Factory::weak_next(FormulaId f) {
    Node n;
    n.kind = Kind::WeakNext;
    n.children = {f};
    return intern(std::move(n));
}

FormulaId Factory::until(FormulaId a, FormulaId b) {
    Node n;
    n.kind = Kind::Until;
    n.children = {a, b};
    return intern(std::move(n));
}

FormulaId Factory::eventually(FormulaId f) {
    Node n;
    n.kind = Kind::Eventually;
    n.children = {f};
    return intern(std::move(n));
}

FormulaId Factory::always(FormulaId f) {
    Node n;
    n.kind = Kind::Always;
    n.children = {f};
    return intern(std::move(n));
}

std::string Factory::to_string(FormulaId id) const {
    const Node& n = node(id);
    auto join = [&](const char* sep) {
        std::string s = "(";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) s += sep;
            s += to_string(n.children[i]);
        }
        return s + ")";
    };
    switch (n.kind) {
        case Kind::True: return "true";
        case Kind::False: return "false";
        case Kind::Letter: return "p" + std::to_string(n.letter);
        case Kind::NotLetter: return "!p" + std::to_string(n.letter);
        case Kind::And: return join(" && ");
        case Kind::Or: return join(" || ");
        case Kind::Next: return "X " + to_string(n.children[0]);
        case Kind::WeakNext: return "WX " + to_string(n.children[0]);
        case Kind::Until:
            return "(" + to_string(n.children[0]) + " U " + to_string(n.children[1]) + ")";
        case Kind::Eventually: return "F " + to_string(n.children[0]);
        case Kind::Always: return "G " + to_string(n.children[0]);
    }
    return "?";
}

}  // namespace tlmt::prop
