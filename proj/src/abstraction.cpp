#include "tlmt/abstraction.hpp"

#include "tlmt/util.hpp"

namespace tlmt::abstraction {

using syntax::LambdaKind;
using syntax::PhiKind;

thread_local std::uint64_t LabelStats::label_calls = 0;

namespace {

// Intern one atom, preserving first-occurrence order.
std::uint32_t letter_for(const syntax::Atom& a, LetterTable& table) {
    std::string key = syntax::normal_key(a);
    auto it = table.index_by_key.find(key);
    if (it != table.index_by_key.end()) return it->second;
    auto idx = static_cast<std::uint32_t>(table.entries.size());
    if (idx >= kMaxLetters) {
        throw CompileError("formula uses more than " + std::to_string(kMaxLetters) +
                           " distinct atoms; the 2^|P| alphabet would be intractable");
    }
    table.entries.push_back({"p" + std::to_string(idx),
                             syntax::atom(a.lhs, a.cmp, a.rhs)});
    table.index_by_key.emplace(std::move(key), idx);
    return idx;
}

// Children are abstracted left before right through explicit locals:
// argument evaluation order must not decide the letter numbering.
prop::FormulaId abstract_lambda(const syntax::LambdaPtr& l, prop::Factory& factory,
                                LetterTable& table) {
    switch (l->kind) {
        case LambdaKind::Atom: return factory.letter(letter_for(l->atom, table));
        case LambdaKind::NotAtom: return factory.not_letter(letter_for(l->atom, table));
        case LambdaKind::And: {
            prop::FormulaId a = abstract_lambda(l->lhs, factory, table);
            prop::FormulaId b = abstract_lambda(l->rhs, factory, table);
            return factory.make_and(a, b);
        }
        case LambdaKind::Or: {
            prop::FormulaId a = abstract_lambda(l->lhs, factory, table);
            prop::FormulaId b = abstract_lambda(l->rhs, factory, table);
            return factory.make_or(a, b);
        }
    }
    return factory.false_id();
}

prop::FormulaId abstract_phi(const syntax::PhiPtr& p, prop::Factory& factory, LetterTable& table) {
    switch (p->kind) {
        case PhiKind::True: return factory.true_id();
        case PhiKind::False: return factory.false_id();
        case PhiKind::Lambda: return abstract_lambda(p->lam, factory, table);
        case PhiKind::And: {
            prop::FormulaId a = abstract_phi(p->lhs, factory, table);
            prop::FormulaId b = abstract_phi(p->rhs, factory, table);
            return factory.make_and(a, b);
        }
        case PhiKind::Or: {
            prop::FormulaId a = abstract_phi(p->lhs, factory, table);
            prop::FormulaId b = abstract_phi(p->rhs, factory, table);
            return factory.make_or(a, b);
        }
        case PhiKind::Next: return factory.next(abstract_phi(p->lhs, factory, table));
        case PhiKind::WeakNext: return factory.weak_next(abstract_phi(p->lhs, factory, table));
        case PhiKind::Until: {
            prop::FormulaId a = abstract_phi(p->lhs, factory, table);
            prop::FormulaId b = abstract_phi(p->rhs, factory, table);
            return factory.until(a, b);
        }
        case PhiKind::Eventually: return factory.eventually(abstract_phi(p->lhs, factory, table));
        case PhiKind::Always: return factory.always(abstract_phi(p->lhs, factory, table));
    }
    return factory.false_id();
}

}  // namespace

AbstractionResult abstract_formula(const syntax::PhiPtr& phi, prop::Factory& factory) {
    if (!syntax::is_resolved(phi)) {
        throw CompileError("abstract_formula requires a resolved formula");
    }
    AbstractionResult res;
    res.formula = abstract_phi(phi, factory, res.table);
    return res;
}

Bitmask label_state(const LetterTable& table, const theory::VarAssignment& mu,
                    const theory::ConstAssignment& kappa) {
    ++LabelStats::label_calls;
    Bitmask mask = 0;
    for (std::uint32_t i = 0; i < table.entries.size(); ++i) {
        if (theory::eval_lambda(table.entries[i].payload, mu, kappa)) {
            mask |= (Bitmask{1} << i);
        }
    }
    return mask;
}

PropTrace abstract_trace(const LetterTable& table, std::span<const theory::VarAssignment> trace,
                         const theory::ConstAssignment& kappa) {
    PropTrace out;
    out.reserve(trace.size());
    for (const auto& mu : trace) out.push_back(label_state(table, mu, kappa));
    return out;
}

LetterTable LetterTable::with_constants(const theory::ConstAssignment& delta) const {
    LetterTable out;
    out.entries.reserve(entries.size());
    for (const auto& e : entries) {
        syntax::LambdaPtr payload = theory::substitute_constants(e.payload, delta);
        out.index_by_key.emplace(syntax::normal_key(payload),
                                 static_cast<std::uint32_t>(out.entries.size()));
        out.entries.push_back({e.name, std::move(payload)});
    }
    return out;
}

}  // namespace tlmt::abstraction
