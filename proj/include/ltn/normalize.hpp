#pragma once

#include <map>
#include <string>
#include <vector>

#include "ltn/logic.hpp"

namespace ltn {

struct NormalizeResult {
  std::vector<Clause> clauses;
  Signature signature;  // input signature plus any fresh Skolem symbols
};

// Prenex-CNF skolemisation. Implications are rewritten as ~A | B, negations
// pushed onto atoms, each existential under n universals replaced by a fresh
// n-ary "_skN" function (constant when n = 0), and disjunction distributed
// over conjunction. Free variables of the input count as outermost
// universals. Rejects (rather than renames) any reuse of a bound variable
// name, so the output clauses are a readable transcript of the input.
NormalizeResult normalize(const Formula& formula, const Signature& signature);

std::vector<std::string> free_variables(const Clause& clause);

// Applies a variable -> closed-term substitution; every free variable of the
// clause must be bound. Throws on missing bindings or open substitution terms.
Clause instantiate(const Clause& clause, const std::map<std::string, Term>& substitution);

// All closed terms of function-nesting depth <= depth, ordered by depth, then
// by symbol declaration order, then lexicographically by argument tuple.
// Throws if the signature has no constants.
std::vector<Term> closed_terms(const Signature& signature, int depth);

struct Instantiation {
  std::vector<Term> binding;  // aligned with the clause's free_vars
  Clause clause;
};

// Every substitution of the clause's free variables by closed terms of
// nesting depth <= depth, in lexicographic order (last variable fastest).
// Ground clauses yield exactly one instantiation with an empty binding.
std::vector<Instantiation> enumerate_bindings(const Clause& clause, const Signature& signature,
                                              int depth);
std::vector<Clause> enumerate_instantiations(const Clause& clause, const Signature& signature,
                                             int depth);

}  // namespace ltn
