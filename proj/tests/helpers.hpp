#pragma once

// Shared test machinery: an independent naive interpreter for terms and
// lambda formulas (the oracle the theory module is checked against), random
// AST generators, and the task formula corpus.

#include <cmath>
#include <string>
#include <vector>

#include "tlmt/abstraction.hpp"
#include "tlmt/rng.hpp"
#include "tlmt/syntax.hpp"
#include "tlmt/theory.hpp"

namespace tlmt::testing {

// ── Naive interpreter (independent of theory::eval_term) ────────────────────

inline double naive_eval_term(const syntax::TermPtr& t, const theory::VarAssignment& mu,
                              const theory::ConstAssignment& kappa) {
    using syntax::TermKind;
    switch (t->kind) {
        case TermKind::Literal: return t->value;
        case TermKind::Identifier:
            if (t->ident == syntax::IdentKind::Variable) return mu.at(t->var_index);
            return kappa.at(t->name);
        case TermKind::Negate: return -naive_eval_term(t->lhs, mu, kappa);
        case TermKind::Add:
            return naive_eval_term(t->lhs, mu, kappa) + naive_eval_term(t->rhs, mu, kappa);
        case TermKind::Sub:
            return naive_eval_term(t->lhs, mu, kappa) - naive_eval_term(t->rhs, mu, kappa);
        case TermKind::Mul:
            return naive_eval_term(t->lhs, mu, kappa) * naive_eval_term(t->rhs, mu, kappa);
        case TermKind::Pow: {
            // deliberately a different algorithm from the implementation
            // (right-to-left product)
            double base = naive_eval_term(t->lhs, mu, kappa);
            double acc = 1.0;
            for (std::uint32_t i = t->exponent; i > 0; --i) acc = base * acc;
            return acc;
        }
        case TermKind::Abs: return std::fabs(naive_eval_term(t->lhs, mu, kappa));
    }
    return 0.0;
}

inline bool naive_eval_atom(const syntax::Atom& a, const theory::VarAssignment& mu,
                            const theory::ConstAssignment& kappa) {
    double l = naive_eval_term(a.lhs, mu, kappa);
    double r = naive_eval_term(a.rhs, mu, kappa);
    switch (a.cmp) {
        case syntax::Cmp::Lt: return l < r;
        case syntax::Cmp::Le: return l <= r;
        case syntax::Cmp::Eq: return l == r;
        case syntax::Cmp::Ne: return l != r;
        case syntax::Cmp::Ge: return l >= r;
        case syntax::Cmp::Gt: return l > r;
    }
    return false;
}

inline bool naive_eval_lambda(const syntax::LambdaPtr& l, const theory::VarAssignment& mu,
                              const theory::ConstAssignment& kappa) {
    using syntax::LambdaKind;
    switch (l->kind) {
        case LambdaKind::Atom: return naive_eval_atom(l->atom, mu, kappa);
        case LambdaKind::NotAtom: return !naive_eval_atom(l->atom, mu, kappa);
        case LambdaKind::And:
            return naive_eval_lambda(l->lhs, mu, kappa) && naive_eval_lambda(l->rhs, mu, kappa);
        case LambdaKind::Or:
            return naive_eval_lambda(l->lhs, mu, kappa) || naive_eval_lambda(l->rhs, mu, kappa);
    }
    return false;
}

// ── Random generators ───────────────────────────────────────────────────────

// Random parser-producible term over the given identifiers (literals are
// non-negative; all identifiers unresolved).
inline syntax::TermPtr random_term(Rng& rng, const std::vector<std::string>& names, int depth) {
    using namespace syntax;
    if (depth <= 0 || uniform01(rng) < 0.35) {
        if (!names.empty() && uniform01(rng) < 0.6) {
            return ident(names[uniform_below(rng, names.size())]);
        }
        return lit(std::round(uniform(rng, 0.0, 2.0) * 100.0) / 100.0);
    }
    switch (uniform_below(rng, 6)) {
        case 0: return add(random_term(rng, names, depth - 1), random_term(rng, names, depth - 1));
        case 1: return sub(random_term(rng, names, depth - 1), random_term(rng, names, depth - 1));
        case 2: return mul(random_term(rng, names, depth - 1), random_term(rng, names, depth - 1));
        case 3: return neg(random_term(rng, names, depth - 1));
        case 4:
            return pow(random_term(rng, names, depth - 1),
                       static_cast<std::uint32_t>(uniform_below(rng, 4)));
        default: return abs(random_term(rng, names, depth - 1));
    }
}

inline syntax::Cmp random_cmp(Rng& rng) {
    return static_cast<syntax::Cmp>(uniform_below(rng, 6));
}

inline syntax::LambdaPtr random_lambda(Rng& rng, const std::vector<std::string>& names,
                                       int depth) {
    using namespace syntax;
    if (depth <= 0 || uniform01(rng) < 0.5) {
        auto l = random_term(rng, names, 2);
        auto r = random_term(rng, names, 2);
        return uniform01(rng) < 0.25 ? not_atom(l, random_cmp(rng), r)
                                     : atom(l, random_cmp(rng), r);
    }
    auto a = random_lambda(rng, names, depth - 1);
    auto b = random_lambda(rng, names, depth - 1);
    return uniform01(rng) < 0.5 ? lambda_and(a, b) : lambda_or(a, b);
}

// Random temporal formula; lambda leaves are single (possibly negated)
// atoms, like the parser produces.
inline syntax::PhiPtr random_phi(Rng& rng, const std::vector<std::string>& names, int depth) {
    using namespace syntax;
    if (depth <= 0 || uniform01(rng) < 0.25) {
        switch (uniform_below(rng, 5)) {
            case 0: return phi_true();
            case 1: return phi_false();
            default: return phi_lambda(random_lambda(rng, names, 0));
        }
    }
    switch (uniform_below(rng, 7)) {
        case 0: return phi_and(random_phi(rng, names, depth - 1), random_phi(rng, names, depth - 1));
        case 1: return phi_or(random_phi(rng, names, depth - 1), random_phi(rng, names, depth - 1));
        case 2:
            return phi_until(random_phi(rng, names, depth - 1), random_phi(rng, names, depth - 1));
        case 3: return phi_next(random_phi(rng, names, depth - 1));
        case 4: return phi_weak_next(random_phi(rng, names, depth - 1));
        case 5: return phi_eventually(random_phi(rng, names, depth - 1));
        default: return phi_always(random_phi(rng, names, depth - 1));
    }
}

// Random propositional LTLf formula over letters 0..num_letters-1.
inline prop::FormulaId random_prop(Rng& rng, prop::Factory& f, std::uint32_t num_letters,
                                   int depth) {
    if (depth <= 0 || uniform01(rng) < 0.3) {
        switch (uniform_below(rng, 6)) {
            case 0: return f.true_id();
            case 1: return f.false_id();
            case 2: return f.not_letter(static_cast<std::uint32_t>(uniform_below(rng, num_letters)));
            default: return f.letter(static_cast<std::uint32_t>(uniform_below(rng, num_letters)));
        }
    }
    switch (uniform_below(rng, 7)) {
        case 0:
            return f.make_and(random_prop(rng, f, num_letters, depth - 1),
                              random_prop(rng, f, num_letters, depth - 1));
        case 1:
            return f.make_or(random_prop(rng, f, num_letters, depth - 1),
                             random_prop(rng, f, num_letters, depth - 1));
        case 2:
            return f.until(random_prop(rng, f, num_letters, depth - 1),
                           random_prop(rng, f, num_letters, depth - 1));
        case 3: return f.next(random_prop(rng, f, num_letters, depth - 1));
        case 4: return f.weak_next(random_prop(rng, f, num_letters, depth - 1));
        case 5: return f.eventually(random_prop(rng, f, num_letters, depth - 1));
        default: return f.always(random_prop(rng, f, num_letters, depth - 1));
    }
}

inline abstraction::PropTrace random_trace(Rng& rng, std::uint32_t num_letters,
                                           std::size_t length) {
    abstraction::PropTrace w(length);
    for (auto& s : w) {
        s = static_cast<abstraction::Bitmask>(uniform_below(rng, 1ull << num_letters));
    }
    return w;
}

// ── Task corpus ─────────────────────────────────────────────────────────────

inline const std::vector<std::string>& corpus_names() {
    static const std::vector<std::string> names = {
        "parking_task1", "parking_task2", "parking_task3", "parking_task4",
        "reacher_task1", "reacher_task2", "reacher_task3"};
    return names;
}

// Full JSON config text for a shipped task config.
std::string corpus_config(const std::string& name);
// Just the formula string of that config.
std::string corpus_formula(const std::string& name);

}  // namespace tlmt::testing
