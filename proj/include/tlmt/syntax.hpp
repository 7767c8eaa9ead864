#pragma once

// ============================================================================
// Syntax layer: terms, atoms, lambda formulas and temporal formulas of the
// lookahead-free temporal fragment over non-linear real arithmetic.
//
// Three layers, mirroring the grammar:
//
//   term    := number | ident | -term | term (+|-|*) term | term ^ uint
//            | abs(term) | (term)
//   lambda  := atom | ! atom | lambda && lambda | lambda || lambda
//   phi     := true | false | lambda | phi U phi | phi || phi | phi && phi
//            | (X|WX|F|G) phi | (phi)
//
// Nodes are immutable and shared; resolve() rebuilds the tree with every
// identifier classified as a state variable (with its index) or a constant.
// Negation exists only directly on atoms; the temporal layer has none, and
// the parser rejects quantifier keywords and lookahead operators outright.
// ============================================================================

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace tlmt::syntax {

// ── Terms ───────────────────────────────────────────────────────────────────

enum class TermKind : std::uint8_t { Literal, Identifier, Negate, Add, Sub, Mul, Pow, Abs };

enum class IdentKind : std::uint8_t { Unresolved, Variable, Constant };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    TermKind kind{};
    double value = 0.0;       // Literal (always non-negative; unary minus is Negate)
    std::string name;         // Identifier
    IdentKind ident = IdentKind::Unresolved;
    std::uint32_t var_index = 0;  // Identifier with ident == Variable
    std::uint32_t exponent = 0;   // Pow
    TermPtr lhs, rhs;             // children; unary nodes use lhs only
};

TermPtr lit(double v);
TermPtr ident(std::string name);
TermPtr neg(TermPtr t);
TermPtr add(TermPtr a, TermPtr b);
TermPtr sub(TermPtr a, TermPtr b);
TermPtr mul(TermPtr a, TermPtr b);
TermPtr pow(TermPtr base, std::uint32_t exponent);
TermPtr abs(TermPtr t);

// ── Atoms and lambda formulas ───────────────────────────────────────────────

enum class Cmp : std::uint8_t { Lt, Le, Eq, Ne, Ge, Gt };

const char* cmp_text(Cmp c);

struct Atom {
    TermPtr lhs;
    Cmp cmp{};
    TermPtr rhs;
};

enum class LambdaKind : std::uint8_t { Atom, NotAtom, And, Or };

struct Lambda;
using LambdaPtr = std::shared_ptr<const Lambda>;

struct Lambda {
    LambdaKind kind{};
    Atom atom;            // Atom / NotAtom
    LambdaPtr lhs, rhs;   // And / Or
};

LambdaPtr atom(TermPtr lhs, Cmp cmp, TermPtr rhs);
LambdaPtr not_atom(TermPtr lhs, Cmp cmp, TermPtr rhs);
LambdaPtr lambda_and(LambdaPtr a, LambdaPtr b);
LambdaPtr lambda_or(LambdaPtr a, LambdaPtr b);

// ── Temporal formulas ───────────────────────────────────────────────────────

enum class PhiKind : std::uint8_t {
    True,
    False,
    Lambda,
    And,
    Or,
    Next,
    WeakNext,
    Until,
    Eventually,
    Always,
};

struct Phi;
using PhiPtr = std::shared_ptr<const Phi>;

struct Phi {
    PhiKind kind{};
    LambdaPtr lam;     // Lambda
    PhiPtr lhs, rhs;   // children; unary temporal nodes use lhs only
};

PhiPtr phi_true();
PhiPtr phi_false();
PhiPtr phi_lambda(LambdaPtr l);
PhiPtr phi_and(PhiPtr a, PhiPtr b);
PhiPtr phi_or(PhiPtr a, PhiPtr b);
PhiPtr phi_next(PhiPtr a);
PhiPtr phi_weak_next(PhiPtr a);
PhiPtr phi_until(PhiPtr a, PhiPtr b);
PhiPtr phi_eventually(PhiPtr a);
PhiPtr phi_always(PhiPtr a);

// ── Signature ───────────────────────────────────────────────────────────────

// Ordered state variables (index = position in the state vector) plus the
// set of constant names. A name is never both.
struct Signature {
    std::vector<std::string> variables;
    std::set<std::string> constants;

    std::unordered_map<std::string, std::uint32_t> variable_index() const;
    std::uint32_t arity() const { return static_cast<std::uint32_t>(variables.size()); }
};

// ── Structural equality and canonical keys ──────────────────────────────────

bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const Atom& a, const Atom& b);
bool equal(const LambdaPtr& a, const LambdaPtr& b);
bool equal(const PhiPtr& a, const PhiPtr& b);

// Canonical key: commutative chains (+, *, &&, ||) flattened and children
// sorted, so syntactically-reordered writings of the same atom or formula
// collide. Used for letter assignment and subformula dedup; the AST itself
// keeps source order.
std::string normal_key(const TermPtr& t);
std::string normal_key(const Atom& a);
std::string normal_key(const LambdaPtr& l);
std::string normal_key(const PhiPtr& p);

// ── Operations ──────────────────────────────────────────────────────────────

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(std::string msg, int line_, int column_)
        : std::runtime_error(std::move(msg)), line(line_), column(column_) {}
};

struct ResolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PhiPtr parse_formula(const std::string& text);

// Standalone lambda-layer parser; handy for letter payloads and tests.
LambdaPtr parse_lambda(const std::string& text);

// Classify every identifier as constant or variable (with its state index).
// Errors on identifiers in neither set or in both.
std::pair<PhiPtr, Signature> resolve(const PhiPtr& ast, const std::set<std::string>& constants,
                                     const std::vector<std::string>& variables);
LambdaPtr resolve_lambda(const LambdaPtr& l, const Signature& sig);

// Fully parenthesized concrete syntax; parse(print(x)) is structurally x.
std::string print_formula(const PhiPtr& ast);
std::string print_lambda(const LambdaPtr& l);
std::string print_term(const TermPtr& t);

// All distinct subformulas (dedup by normal_key), depth-first preorder of
// first occurrence.
std::vector<PhiPtr> subformulas(const PhiPtr& ast);

// Identifier names appearing in the formula, in first-occurrence order.
std::vector<std::string> identifiers(const PhiPtr& ast);

bool is_resolved(const PhiPtr& ast);

}  // namespace tlmt::syntax
