#include "ltn/normalize.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ltn {

namespace {

// ------------------------------------------------------------ validation

void collect_term_vars(const Term& t, std::vector<std::string>& out) {
  t.collect_variables(out);
}

void check_term(const Term& t, const Signature& sig) {
  switch (t.kind()) {
    case Term::Kind::constant:
      if (!sig.has_constant(t.symbol()))
        throw std::invalid_argument("unknown constant '" + t.symbol() + "'");
      return;
    case Term::Kind::variable:
      if (sig.has_symbol(t.symbol()))
        throw std::invalid_argument("variable '" + t.symbol() + "' collides with a declared symbol");
      return;
    case Term::Kind::apply: {
      const int arity = sig.function_arity(t.symbol());
      if (static_cast<int>(t.args().size()) != arity)
        throw std::invalid_argument("function '" + t.symbol() + "' expects " +
                                    std::to_string(arity) + " argument(s), got " +
                                    std::to_string(t.args().size()));
      for (const Term& a : t.args()) check_term(a, sig);
      return;
    }
  }
}

// Well-formedness walk: symbols declared, arities match, and no bound
// variable name is ever reused (no shadowing, no sibling reuse, no clash
// with a free occurrence elsewhere).
struct Validator {
  const Signature& sig;
  std::set<std::string> bound_anywhere;   // every quantified name seen
  std::vector<std::string> free_order;    // free variables, first occurrence

  void atom_vars(const Formula& f, const std::vector<std::string>& in_scope) {
    std::vector<std::string> vars;
    for (const Term& t : f.args()) collect_term_vars(t, vars);
    for (const auto& v : vars) {
      if (std::find(in_scope.begin(), in_scope.end(), v) != in_scope.end()) continue;
      if (bound_anywhere.count(v))
        throw std::invalid_argument("variable '" + v +
                                    "' is used both free and bound; rename one of them");
      if (std::find(free_order.begin(), free_order.end(), v) == free_order.end())
        free_order.push_back(v);
    }
  }

  void walk(const Formula& f, std::vector<std::string>& in_scope) {
    switch (f.kind()) {
      case Formula::Kind::atom: {
        const int arity = sig.predicate_arity(f.predicate());
        if (static_cast<int>(f.args().size()) != arity)
          throw std::invalid_argument("predicate '" + f.predicate() + "' expects " +
                                      std::to_string(arity) + " argument(s), got " +
                                      std::to_string(f.args().size()));
        for (const Term& t : f.args()) check_term(t, sig);
        atom_vars(f, in_scope);
        return;
      }
      case Formula::Kind::negation:
        walk(*f.child(), in_scope);
        return;
      case Formula::Kind::conjunction:
      case Formula::Kind::disjunction:
      case Formula::Kind::implication:
        walk(*f.lhs(), in_scope);
        walk(*f.rhs(), in_scope);
        return;
      case Formula::Kind::forall:
      case Formula::Kind::exists: {
        const std::string& v = f.var();
        if (sig.has_symbol(v))
          throw std::invalid_argument("bound variable '" + v + "' shadows a declared symbol");
        if (bound_anywhere.count(v))
          throw std::invalid_argument("bound variable '" + v +
                                      "' is reused; rename it (no silent renaming)");
        if (std::find(free_order.begin(), free_order.end(), v) != free_order.end())
          throw std::invalid_argument("variable '" + v +
                                      "' is used both free and bound; rename one of them");
        bound_anywhere.insert(v);
        in_scope.push_back(v);
        walk(*f.child(), in_scope);
        in_scope.pop_back();
        return;
      }
    }
  }
};

// ---------------------------------------------------------- NNF rewriting

FormulaPtr eliminate_implications(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::atom:
      return f;
    case Formula::Kind::negation:
      return Formula::negation(eliminate_implications(f->child()));
    case Formula::Kind::conjunction:
      return Formula::conjunction(eliminate_implications(f->lhs()),
                                  eliminate_implications(f->rhs()));
    case Formula::Kind::disjunction:
      return Formula::disjunction(eliminate_implications(f->lhs()),
                                  eliminate_implications(f->rhs()));
    case Formula::Kind::implication:
      return Formula::disjunction(Formula::negation(eliminate_implications(f->lhs())),
                                  eliminate_implications(f->rhs()));
    case Formula::Kind::forall:
      return Formula::forall(f->var(), eliminate_implications(f->child()));
    case Formula::Kind::exists:
      return Formula::exists(f->var(), eliminate_implications(f->child()));
  }
  return f;
}

FormulaPtr to_nnf(const FormulaPtr& f, bool negate) {
  switch (f->kind()) {
    case Formula::Kind::atom:
      return negate ? Formula::negation(f) : f;
    case Formula::Kind::negation:
      return to_nnf(f->child(), !negate);
    case Formula::Kind::conjunction:
      return negate ? Formula::disjunction(to_nnf(f->lhs(), true), to_nnf(f->rhs(), true))
                    : Formula::conjunction(to_nnf(f->lhs(), false), to_nnf(f->rhs(), false));
    case Formula::Kind::disjunction:
      return negate ? Formula::conjunction(to_nnf(f->lhs(), true), to_nnf(f->rhs(), true))
                    : Formula::disjunction(to_nnf(f->lhs(), false), to_nnf(f->rhs(), false));
    case Formula::Kind::forall:
      return negate ? Formula::exists(f->var(), to_nnf(f->child(), true))
                    : Formula::forall(f->var(), to_nnf(f->child(), false));
    case Formula::Kind::exists:
      return negate ? Formula::forall(f->var(), to_nnf(f->child(), true))
                    : Formula::exists(f->var(), to_nnf(f->child(), false));
    case Formula::Kind::implication:
      break;  // eliminated earlier
  }
  throw std::logic_error("to_nnf: implication survived elimination");
}

// ---------------------------------------------------------- skolemisation

Term substitute_term(const Term& t, const std::string& var, const Term& replacement) {
  switch (t.kind()) {
    case Term::Kind::constant: return t;
    case Term::Kind::variable: return t.symbol() == var ? replacement : t;
    case Term::Kind::apply: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(substitute_term(a, var, replacement));
      return Term::apply(t.symbol(), std::move(args));
    }
  }
  return t;
}

FormulaPtr substitute_formula(const FormulaPtr& f, const std::string& var,
                              const Term& replacement) {
  switch (f->kind()) {
    case Formula::Kind::atom: {
      std::vector<Term> args;
      args.reserve(f->args().size());
      for (const Term& a : f->args()) args.push_back(substitute_term(a, var, replacement));
      return Formula::atom(f->predicate(), std::move(args));
    }
    case Formula::Kind::negation:
      return Formula::negation(substitute_formula(f->child(), var, replacement));
    case Formula::Kind::conjunction:
      return Formula::conjunction(substitute_formula(f->lhs(), var, replacement),
                                  substitute_formula(f->rhs(), var, replacement));
    case Formula::Kind::disjunction:
      return Formula::disjunction(substitute_formula(f->lhs(), var, replacement),
                                  substitute_formula(f->rhs(), var, replacement));
    case Formula::Kind::forall:
      return Formula::forall(f->var(), substitute_formula(f->child(), var, replacement));
    case Formula::Kind::exists:
      return Formula::exists(f->var(), substitute_formula(f->child(), var, replacement));
    case Formula::Kind::implication:
      break;
  }
  throw std::logic_error("substitute_formula: unexpected implication");
}

// Drops quantifiers from an NNF formula, replacing each existential variable
// by a Skolem term over the universals in scope at that point. Skolem symbols
// are added to `sig` in traversal order.
FormulaPtr skolemize(const FormulaPtr& f, std::vector<std::string> universals, Signature& sig) {
  switch (f->kind()) {
    case Formula::Kind::atom:
    case Formula::Kind::negation:  // negations sit on atoms in NNF
      return f;
    case Formula::Kind::conjunction:
      return Formula::conjunction(skolemize(f->lhs(), universals, sig),
                                  skolemize(f->rhs(), universals, sig));
    case Formula::Kind::disjunction:
      return Formula::disjunction(skolemize(f->lhs(), universals, sig),
                                  skolemize(f->rhs(), universals, sig));
    case Formula::Kind::forall: {
      universals.push_back(f->var());
      return skolemize(f->child(), std::move(universals), sig);
    }
    case Formula::Kind::exists: {
      const std::string name = sig.fresh_skolem_name();
      Term replacement = Term::constant(name);
      if (universals.empty()) {
        sig.add_constant(name);
      } else {
        sig.add_function(name, static_cast<int>(universals.size()));
        std::vector<Term> args;
        args.reserve(universals.size());
        for (const auto& u : universals) args.push_back(Term::variable(u));
        replacement = Term::apply(name, std::move(args));
      }
      FormulaPtr body = substitute_formula(f->child(), f->var(), replacement);
      return skolemize(body, std::move(universals), sig);
    }
    case Formula::Kind::implication:
      break;
  }
  throw std::logic_error("skolemize: unexpected implication");
}

// --------------------------------------------------------------- CNF

// The matrix is quantifier-free NNF. cnf(A & B) = cnf(A) u cnf(B);
// cnf(A | B) crosses the two clause sets; a literal is a unit clause.
void to_clauses(const FormulaPtr& f, std::vector<Clause>& out) {
  switch (f->kind()) {
    case Formula::Kind::conjunction:
      to_clauses(f->lhs(), out);
      to_clauses(f->rhs(), out);
      return;
    case Formula::Kind::disjunction: {
      std::vector<Clause> left, right;
      to_clauses(f->lhs(), left);
      to_clauses(f->rhs(), right);
      for (const Clause& l : left)
        for (const Clause& r : right) {
          std::vector<Literal> lits = l.literals;
          lits.insert(lits.end(), r.literals.begin(), r.literals.end());
          out.push_back(Clause::of(std::move(lits)));
        }
      return;
    }
    case Formula::Kind::atom:
      out.push_back(Clause::of({Literal{false, f->predicate(), f->args()}}));
      return;
    case Formula::Kind::negation:
      out.push_back(Clause::of({Literal{true, f->child()->predicate(), f->child()->args()}}));
      return;
    default:
      throw std::logic_error("to_clauses: quantifier survived skolemisation");
  }
}

}  // namespace

NormalizeResult normalize(const Formula& formula, const Signature& signature) {
  auto f = std::shared_ptr<const Formula>(&formula, [](const Formula*) {});

  Validator validator{signature, {}, {}};
  std::vector<std::string> scope;
  validator.walk(formula, scope);

  NormalizeResult result;
  result.signature = signature;

  FormulaPtr nnf = to_nnf(eliminate_implications(f), false);
  // Free variables are implicitly universal and outermost; existentials
  // beneath them must depend on them.
  FormulaPtr matrix = skolemize(nnf, validator.free_order, result.signature);

  std::vector<Clause> clauses;
  to_clauses(matrix, clauses);

  // The result is a set: drop exact duplicate clauses, keeping first positions.
  for (Clause& c : clauses) {
    bool seen = false;
    for (const Clause& kept : result.clauses)
      if (kept == c) {
        seen = true;
        break;
      }
    if (!seen) result.clauses.push_back(std::move(c));
  }
  return result;
}

std::vector<std::string> free_variables(const Clause& clause) { return clause.free_vars; }

namespace {

Term apply_substitution(const Term& t, const std::map<std::string, Term>& sub) {
  switch (t.kind()) {
    case Term::Kind::constant: return t;
    case Term::Kind::variable: {
      auto it = sub.find(t.symbol());
      if (it == sub.end())
        throw std::invalid_argument("instantiate: no binding for variable '" + t.symbol() + "'");
      return it->second;
    }
    case Term::Kind::apply: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(apply_substitution(a, sub));
      return Term::apply(t.symbol(), std::move(args));
    }
  }
  return t;
}

}  // namespace

Clause instantiate(const Clause& clause, const std::map<std::string, Term>& substitution) {
  for (const auto& [var, term] : substitution)
    if (!term.is_closed())
      throw std::invalid_argument("instantiate: substitution for '" + var + "' is not closed");
  std::vector<Literal> lits;
  lits.reserve(clause.literals.size());
  for (const Literal& l : clause.literals) {
    Literal out{l.negated, l.predicate, {}};
    out.args.reserve(l.args.size());
    for (const Term& t : l.args) out.args.push_back(apply_substitution(t, substitution));
    lits.push_back(std::move(out));
  }
  return Clause::of(std::move(lits));
}

std::vector<Term> closed_terms(const Signature& signature, int depth) {
  if (depth < 0) throw std::invalid_argument("closed_terms: depth must be >= 0");
  const auto constants = signature.constants();
  if (constants.empty())
    throw std::invalid_argument("closed_terms: signature has no constants (empty universe)");

  std::vector<Term> universe;
  for (const auto& c : constants) universe.push_back(Term::constant(c));

  std::size_t layer_begin = 0;  // first index of the previous depth layer
  for (int d = 1; d <= depth; ++d) {
    const std::size_t layer_end = universe.size();
    std::vector<Term> next;
    for (const auto& [fn, arity] : signature.functions()) {
      // Argument tuples over everything built so far, lexicographic, keeping
      // only tuples that use at least one term of the previous layer (those
      // are exactly the terms of nesting depth d).
      std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
      while (true) {
        bool reaches_prev = false;
        for (std::size_t i : idx)
          if (i >= layer_begin) reaches_prev = true;
        if (reaches_prev) {
          std::vector<Term> args;
          args.reserve(idx.size());
          for (std::size_t i : idx) args.push_back(universe[i]);
          next.push_back(Term::apply(fn, std::move(args)));
        }
        // odometer over [0, layer_end)
        std::size_t pos = idx.size();
        while (pos > 0) {
          --pos;
          if (++idx[pos] < layer_end) break;
          idx[pos] = 0;
          if (pos == 0) {
            pos = idx.size() + 1;  // flag: wrapped fully
            break;
          }
        }
        if (pos == idx.size() + 1) break;
      }
    }
    layer_begin = layer_end;
    universe.insert(universe.end(), next.begin(), next.end());
    if (next.empty()) break;  // no functions: deeper layers stay empty
  }
  return universe;
}

std::vector<Instantiation> enumerate_bindings(const Clause& clause, const Signature& signature,
                                              int depth) {
  std::vector<Instantiation> out;
  if (clause.is_ground()) {
    out.push_back(Instantiation{{}, clause});
    return out;
  }
  const std::vector<Term> universe = closed_terms(signature, depth);
  const std::size_t vars = clause.free_vars.size();
  std::vector<std::size_t> idx(vars, 0);
  while (true) {
    std::map<std::string, Term> sub;
    Instantiation inst;
    inst.binding.reserve(vars);
    for (std::size_t i = 0; i < vars; ++i) {
      sub.emplace(clause.free_vars[i], universe[idx[i]]);
      inst.binding.push_back(universe[idx[i]]);
    }
    inst.clause = instantiate(clause, sub);
    out.push_back(std::move(inst));

    std::size_t pos = vars;
    bool done = false;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < universe.size()) break;
      idx[pos] = 0;
      if (pos == 0) done = true;
    }
    if (done) break;
  }
  return out;
}

std::vector<Clause> enumerate_instantiations(const Clause& clause, const Signature& signature,
                                             int depth) {
  std::vector<Clause> out;
  for (auto& inst : enumerate_bindings(clause, signature, depth))
    out.push_back(std::move(inst.clause));
  return out;
}

}  // namespace ltn
