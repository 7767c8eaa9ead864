#pragma once

// Ground evaluator for quantifier-free NRA terms, atoms and lambda formulas.
// On fully instantiated states the decision procedure degenerates to plain
// evaluation; eval_lambda is the single entry point a solver backend would
// replace.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tlmt/syntax.hpp"

namespace tlmt::theory {

// Dense state vector, indexed per Signature variable order.
using VarAssignment = std::vector<double>;

// Constant name -> value. std::map keeps iteration deterministic.
using ConstAssignment = std::map<std::string, double>;

// Evaluation counters for cost-model assertions (e.g. CRM reuses one state
// labeling across |Q| counterfactuals). Thread-local so parallel seeds do
// not interfere.
struct EvalStats {
    static thread_local std::uint64_t lambda_evals;
};

double eval_term(const syntax::TermPtr& t, const VarAssignment& mu, const ConstAssignment& kappa);

bool eval_atom(const syntax::Atom& a, const VarAssignment& mu, const ConstAssignment& kappa);

bool eval_lambda(const syntax::LambdaPtr& l, const VarAssignment& mu, const ConstAssignment& kappa);

// Replace the constants named in delta by numeric literals; other constants
// are untouched. Unknown names in delta are ignored with a warning.
syntax::TermPtr substitute_constants(const syntax::TermPtr& t, const ConstAssignment& delta);
syntax::LambdaPtr substitute_constants(const syntax::LambdaPtr& l, const ConstAssignment& delta);
syntax::PhiPtr substitute_constants(const syntax::PhiPtr& p, const ConstAssignment& delta);

}  // namespace tlmt::theory
