#include "tlmt/theory.hpp"

#include <algorithm>
#include <cmath>

#include "tlmt/log.hpp"
#include "tlmt/util.hpp"

namespace tlmt::theory {

using syntax::IdentKind;
using syntax::LambdaKind;
using syntax::TermKind;

thread_local std::uint64_t EvalStats::lambda_evals = 0;

double eval_term(const syntax::TermPtr& t, const VarAssignment& mu, const ConstAssignment& kappa) {
    double v = 0.0;
    switch (t->kind) {
        case TermKind::Literal: v = t->value; break;
        case TermKind::Identifier:
            switch (t->ident) {
                case IdentKind::Variable:
                    if (t->var_index >= mu.size()) {
                        throw EvalError("state vector too short for variable '" + t->name + "'");
                    }
                    v = mu[t->var_index];
                    break;
                case IdentKind::Constant: {
                    auto it = kappa.find(t->name);
                    if (it == kappa.end()) {
                        throw EvalError("missing constant '" + t->name + "' in assignment");
                    }
                    v = it->second;
                    break;
                }
                case IdentKind::Unresolved:
                    throw EvalError("cannot evaluate unresolved identifier '" + t->name + "'");
            }
            break;
        case TermKind::Negate: v = -eval_term(t->lhs, mu, kappa); break;
        case TermKind::Add: v = eval_term(t->lhs, mu, kappa) + eval_term(t->rhs, mu, kappa); break;
        case TermKind::Sub: v = eval_term(t->lhs, mu, kappa) - eval_term(t->rhs, mu, kappa); break;
        case TermKind::Mul: v = eval_term(t->lhs, mu, kappa) * eval_term(t->rhs, mu, kappa); break;
        case TermKind::Pow: {
            // Repeated multiplication, not std::pow: exact for integer
            // exponents and identical across libm implementations.
            double base = eval_term(t->lhs, mu, kappa);
            v = 1.0;
            for (std::uint32_t i = 0; i < t->exponent; ++i) v *= base;
            break;
        }
        case TermKind::Abs: v = std::fabs(eval_term(t->lhs, mu, kappa)); break;
    }
    if (!std::isfinite(v)) {
        throw EvalError("non-finite value while evaluating term '" + syntax::print_term(t) + "'");
    }
    return v;
}

bool eval_atom(const syntax::Atom& a, const VarAssignment& mu, const ConstAssignment& kappa) {
    double lhs = eval_term(a.lhs, mu, kappa);
    double rhs = eval_term(a.rhs, mu, kappa);
    switch (a.cmp) {
        case syntax::Cmp::Lt: return lhs < rhs;
        case syntax::Cmp::Le: return lhs <= rhs;
        case syntax::Cmp::Eq: return lhs == rhs;
        case syntax::Cmp::Ne: return lhs != rhs;
        case syntax::Cmp::Ge: return lhs >= rhs;
        case syntax::Cmp::Gt: return lhs > rhs;
    }
    return false;
}

bool eval_lambda(const syntax::LambdaPtr& l, const VarAssignment& mu, const ConstAssignment& kappa) {
    ++EvalStats::lambda_evals;
    switch (l->kind) {
        case LambdaKind::Atom: return eval_atom(l->atom, mu, kappa);
        case LambdaKind::NotAtom: return !eval_atom(l->atom, mu, kappa);
        case LambdaKind::And: return eval_lambda(l->lhs, mu, kappa) && eval_lambda(l->rhs, mu, kappa);
        case LambdaKind::Or: return eval_lambda(l->lhs, mu, kappa) || eval_lambda(l->rhs, mu, kappa);
    }
    return false;
}

// ── Constant substitution ───────────────────────────────────────────────────

namespace {

syntax::TermPtr literal_for(double v) {
    // Literals stay non-negative; negative values substitute as -(|v|).
    if (v < 0.0) return syntax::neg(syntax::lit(-v));
    return syntax::lit(v);
}

}  // namespace

syntax::TermPtr substitute_constants(const syntax::TermPtr& t, const ConstAssignment& delta) {
    switch (t->kind) {
        case TermKind::Literal: return t;
        case TermKind::Identifier: {
            if (t->ident == IdentKind::Constant) {
                auto it = delta.find(t->name);
                if (it != delta.end()) return literal_for(it->second);
            }
            return t;
        }
        default: {
            auto r = std::make_shared<syntax::Term>(*t);
            if (t->lhs) r->lhs = substitute_constants(t->lhs, delta);
            if (t->rhs) r->rhs = substitute_constants(t->rhs, delta);
            return r;
        }
    }
}

syntax::LambdaPtr substitute_constants(const syntax::LambdaPtr& l, const ConstAssignment& delta) {
    auto r = std::make_shared<syntax::Lambda>(*l);
    switch (l->kind) {
        case LambdaKind::Atom:
        case LambdaKind::NotAtom:
            r->atom.lhs = substitute_constants(l->atom.lhs, delta);
            r->atom.rhs = substitute_constants(l->atom.rhs, delta);
            break;
        case LambdaKind::And:
        case LambdaKind::Or:
            r->lhs = substitute_constants(l->lhs, delta);
            r->rhs = substitute_constants(l->rhs, delta);
            break;
    }
    return r;
}

namespace {

syntax::PhiPtr substitute_phi(const syntax::PhiPtr& p, const ConstAssignment& delta) {
    auto r = std::make_shared<syntax::Phi>(*p);
    if (p->lam) r->lam = substitute_constants(p->lam, delta);
    if (p->lhs) r->lhs = substitute_phi(p->lhs, delta);
    if (p->rhs) r->rhs = substitute_phi(p->rhs, delta);
    return r;
}

}  // namespace

syntax::PhiPtr substitute_constants(const syntax::PhiPtr& p, const ConstAssignment& delta) {
    // Names that occur nowhere in the formula are skipped with a warning.
    auto names = syntax::identifiers(p);
    for (const auto& [name, value] : delta) {
        (void)value;
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            log::warn("substitute_constants: '" + name + "' does not occur in the formula");
        }
    }
    return substitute_phi(p, delta);
}

}  // namespace tlmt::theory
