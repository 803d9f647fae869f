#include "ltn/logic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ltn {

// ---------------------------------------------------------------- Signature

void Signature::check_fresh(const std::string& name) const {
  if (kind_.count(name))
    throw std::invalid_argument("symbol '" + name + "' declared more than once");
}

void Signature::add_constant_group(const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("empty constant group");
  for (const auto& n : names) check_fresh(n);
  // Names inside one group must be distinct too; check_fresh only
  // catches collisions with previously registered symbols.
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j])
        throw std::invalid_argument("symbol '" + names[i] + "' declared more than once");
  groups_.push_back(names);
  for (const auto& n : names) kind_[n] = 0;
}

void Signature::add_constant(const std::string& name) { add_constant_group({name}); }

void Signature::add_function(const std::string& name, int arity) {
  check_fresh(name);
  if (arity < 1) throw std::invalid_argument("function '" + name + "' needs arity >= 1");
  functions_.emplace_back(name, arity);
  kind_[name] = 1;
}

void Signature::add_predicate(const std::string& name, int arity) {
  check_fresh(name);
  if (arity < 1) throw std::invalid_argument("predicate '" + name + "' needs arity >= 1");
  predicates_.emplace_back(name, arity);
  kind_[name] = 2;
}

bool Signature::has_constant(const std::string& name) const {
  auto it = kind_.find(name);
  return it != kind_.end() && it->second == 0;
}

bool Signature::has_function(const std::string& name) const {
  auto it = kind_.find(name);
  return it != kind_.end() && it->second == 1;
}

bool Signature::has_predicate(const std::string& name) const {
  auto it = kind_.find(name);
  return it != kind_.end() && it->second == 2;
}

bool Signature::has_symbol(const std::string& name) const { return kind_.count(name) != 0; }

int Signature::function_arity(const std::string& name) const {
  for (const auto& [f, a] : functions_)
    if (f == name) return a;
  throw std::invalid_argument("unknown function '" + name + "'");
}

int Signature::predicate_arity(const std::string& name) const {
  for (const auto& [p, a] : predicates_)
    if (p == name) return a;
  throw std::invalid_argument("unknown predicate '" + name + "'");
}

std::vector<std::string> Signature::constants() const {
  std::vector<std::string> out;
  for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
  return out;
}

std::string Signature::fresh_skolem_name() const {
  for (int i = 0;; ++i) {
    std::string name = "_sk" + std::to_string(i);
    if (!has_symbol(name)) return name;
  }
}

bool Signature::operator==(const Signature& other) const {
  return groups_ == other.groups_ && functions_ == other.functions_ &&
         predicates_ == other.predicates_;
}

// --------------------------------------------------------------------- Term

Term Term::constant(std::string name) { return Term(Kind::constant, std::move(name), {}); }
Term Term::variable(std::string name) { return Term(Kind::variable, std::move(name), {}); }

Term Term::apply(std::string function, std::vector<Term> args) {
  if (args.empty()) throw std::invalid_argument("apply: functions take at least one argument");
  return Term(Kind::apply, std::move(function), std::move(args));
}

bool Term::is_closed() const {
  switch (kind_) {
    case Kind::constant: return true;
    case Kind::variable: return false;
    case Kind::apply:
      return std::all_of(args_.begin(), args_.end(), [](const Term& t) { return t.is_closed(); });
  }
  return false;
}

int Term::nesting_depth() const {
  if (kind_ != Kind::apply) return 0;
  int deepest = 0;
  for (const Term& a : args_) deepest = std::max(deepest, a.nesting_depth());
  return 1 + deepest;
}

void Term::collect_variables(std::vector<std::string>& out) const {
  switch (kind_) {
    case Kind::constant: return;
    case Kind::variable:
      if (std::find(out.begin(), out.end(), symbol_) == out.end()) out.push_back(symbol_);
      return;
    case Kind::apply:
      for (const Term& a : args_) a.collect_variables(out);
      return;
  }
}

std::string Term::to_string() const {
  if (kind_ != Kind::apply) return symbol_;
  std::string s = symbol_ + "(";
  for (std::size_t i = 0; i < args_.size(); ++i) {
    if (i) s += ", ";
    s += args_[i].to_string();
  }
  return s + ")";
}

bool Term::operator==(const Term& other) const {
  return kind_ == other.kind_ && symbol_ == other.symbol_ && args_ == other.args_;
}

// ------------------------------------------------------------ Literal/Clause

std::string Literal::to_string() const {
  std::string s = negated ? "~" : "";
  s += predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += args[i].to_string();
  }
  return s + ")";
}

bool Literal::operator==(const Literal& other) const {
  return negated == other.negated && predicate == other.predicate && args == other.args;
}

Clause Clause::of(std::vector<Literal> literals) {
  if (literals.empty()) throw std::invalid_argument("clause needs at least one literal");
  Clause c;
  c.literals = std::move(literals);
  for (const Literal& l : c.literals)
    for (const Term& t : l.args) t.collect_variables(c.free_vars);
  return c;
}

std::string Clause::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < literals.size(); ++i) {
    if (i) s += " | ";
    s += literals[i].to_string();
  }
  return s;
}

bool Clause::operator==(const Clause& other) const {
  return literals == other.literals && free_vars == other.free_vars;
}

// ------------------------------------------------------------------ Formula

FormulaPtr Formula::atom(std::string predicate, std::vector<Term> args) {
  auto f = std::shared_ptr<Formula>(new Formula(Kind::atom));
  f->symbol_ = std::move(predicate);
  f->args_ = std::move(args);
  return f;
}

FormulaPtr Formula::negation(FormulaPtr inner) {
  auto f = std::shared_ptr<Formula>(new Formula(Kind::negation));
  f->lhs_ = std::move(inner);
  return f;
}

FormulaPtr Formula::conjunction(FormulaPtr lhs, FormulaPtr rhs) {
  return make_binary(Kind::conjunction, std::move(lhs), std::move(rhs));
}
FormulaPtr Formula::disjunction(FormulaPtr lhs, FormulaPtr rhs) {
  return make_binary(Kind::disjunction, std::move(lhs), std::move(rhs));
}
FormulaPtr Formula::implication(FormulaPtr lhs, FormulaPtr rhs) {
  return make_binary(Kind::implication, std::move(lhs), std::move(rhs));
}

FormulaPtr Formula::forall(std::string var, FormulaPtr body) {
  auto f = std::shared_ptr<Formula>(new Formula(Kind::forall));
  f->symbol_ = std::move(var);
  f->lhs_ = std::move(body);
  return f;
}

FormulaPtr Formula::exists(std::string var, FormulaPtr body) {
  auto f = std::shared_ptr<Formula>(new Formula(Kind::exists));
  f->symbol_ = std::move(var);
  f->lhs_ = std::move(body);
  return f;
}

FormulaPtr Formula::make_binary(Kind kind, FormulaPtr lhs, FormulaPtr rhs) {
  auto f = std::shared_ptr<Formula>(new Formula(kind));
  f->lhs_ = std::move(lhs);
  f->rhs_ = std::move(rhs);
  return f;
}

// Precedence for printing: -> 1, | 2, & 3, ~ and quantifiers bind tightest.
static int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::implication: return 1;
    case Formula::Kind::disjunction: return 2;
    case Formula::Kind::conjunction: return 3;
    default: return 4;
  }
}

static void print_formula(const Formula& f, std::string& out, int parent_prec) {
  const int prec = precedence(f.kind());
  switch (f.kind()) {
    case Formula::Kind::atom: {
      out += f.predicate();
      out += '(';
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        if (i) out += ", ";
        out += f.args()[i].to_string();
      }
      out += ')';
      return;
    }
    case Formula::Kind::negation:
      out += '~';
      print_formula(*f.child(), out, prec);
      return;
    case Formula::Kind::forall:
    case Formula::Kind::exists: {
      // Quantifier scope runs to the end of the formula, so it must be
      // parenthesised whenever it appears under a connective.
      const bool parens = parent_prec > 0;
      if (parens) out += '(';
      const Formula* at = &f;
      out += (f.kind() == Formula::Kind::forall) ? "forall " : "exists ";
      bool first = true;
      while (at->kind() == f.kind()) {
        if (!first) out += ' ';
        out += at->var();
        first = false;
        at = at->child().get();
      }
      out += ": ";
      print_formula(*at, out, 0);
      if (parens) out += ')';
      return;
    }
    case Formula::Kind::conjunction:
    case Formula::Kind::disjunction:
    case Formula::Kind::implication: {
      const bool parens = prec < parent_prec;
      if (parens) out += '(';
      const char* op = f.kind() == Formula::Kind::conjunction   ? " & "
                       : f.kind() == Formula::Kind::disjunction ? " | "
                                                                : " -> ";
      // -> is right-associative; & and | associate to the left.
      const int lhs_prec = f.kind() == Formula::Kind::implication ? prec + 1 : prec;
      const int rhs_prec = f.kind() == Formula::Kind::implication ? prec : prec + 1;
      print_formula(*f.lhs(), out, lhs_prec);
      out += op;
      print_formula(*f.rhs(), out, rhs_prec);
      if (parens) out += ')';
      return;
    }
  }
}

std::string Formula::to_string() const {
  std::string out;
  print_formula(*this, out, 0);
  return out;
}

bool formulas_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Formula::Kind::atom:
      return a->predicate() == b->predicate() && a->args() == b->args();
    case Formula::Kind::negation:
      return formulas_equal(a->child(), b->child());
    case Formula::Kind::forall:
    case Formula::Kind::exists:
      return a->var() == b->var() && formulas_equal(a->child(), b->child());
    case Formula::Kind::conjunction:
    case Formula::Kind::disjunction:
    case Formula::Kind::implication:
      return formulas_equal(a->lhs(), b->lhs()) && formulas_equal(a->rhs(), b->rhs());
  }
  return false;
}

}  // namespace ltn
