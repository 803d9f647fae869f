#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ltn {

// Symbol table of the language: constant, function and predicate symbols.
// Names are unique across all three kinds. Constants keep their declaration
// order and are partitioned into declaration groups (one `const` statement
// per group); reports use the partition to lay out per-group tables.
class Signature {
 public:
  void add_constant_group(const std::vector<std::string>& names);
  void add_constant(const std::string& name);  // singleton group
  void add_function(const std::string& name, int arity);
  void add_predicate(const std::string& name, int arity);

  bool has_constant(const std::string& name) const;
  bool has_function(const std::string& name) const;
  bool has_predicate(const std::string& name) const;
  bool has_symbol(const std::string& name) const;

  int function_arity(const std::string& name) const;   // throws on unknown
  int predicate_arity(const std::string& name) const;  // throws on unknown

  std::vector<std::string> constants() const;  // flattened, declaration order
  const std::vector<std::vector<std::string>>& constant_groups() const { return groups_; }
  const std::vector<std::pair<std::string, int>>& functions() const { return functions_; }
  const std::vector<std::pair<std::string, int>>& predicates() const { return predicates_; }

  // Next unused "_skN" name.
  std::string fresh_skolem_name() const;

  bool operator==(const Signature& other) const;

 private:
  void check_fresh(const std::string& name) const;

  std::vector<std::vector<std::string>> groups_;
  std::vector<std::pair<std::string, int>> functions_;
  std::vector<std::pair<std::string, int>> predicates_;
  std::map<std::string, int> kind_;  // 0 constant, 1 function, 2 predicate
};

// First-order term: constant, variable, or function application.
class Term {
 public:
  enum class Kind { constant, variable, apply };

  static Term constant(std::string name);
  static Term variable(std::string name);
  static Term apply(std::string function, std::vector<Term> args);

  Kind kind() const { return kind_; }
  const std::string& symbol() const { return symbol_; }
  const std::vector<Term>& args() const { return args_; }

  bool is_closed() const;
  int nesting_depth() const;  // constants/variables 0, f(t) = 1 + max arg
  void collect_variables(std::vector<std::string>& out) const;  // first occurrence, deduped
  std::string to_string() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

 private:
  Term(Kind kind, std::string symbol, std::vector<Term> args)
      : kind_(kind), symbol_(std::move(symbol)), args_(std::move(args)) {}

  Kind kind_;
  std::string symbol_;
  std::vector<Term> args_;
};

struct Literal {
  bool negated = false;
  std::string predicate;
  std::vector<Term> args;

  std::string to_string() const;
  bool operator==(const Literal& other) const;
  bool operator!=(const Literal& other) const { return !(*this == other); }
};

// Disjunction of literals. Free variables are implicitly universally
// quantified; they are kept in first-occurrence order (the tuple the
// satisfaction condition ranges over).
struct Clause {
  std::vector<Literal> literals;
  std::vector<std::string> free_vars;

  static Clause of(std::vector<Literal> literals);

  bool is_ground() const { return free_vars.empty(); }
  std::string to_string() const;
  bool operator==(const Clause& other) const;
  bool operator!=(const Clause& other) const { return !(*this == other); }
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Input-side formula tree: atoms, ~, &, |, ->, forall, exists.
class Formula {
 public:
  enum class Kind { atom, negation, conjunction, disjunction, implication, forall, exists };

  static FormulaPtr atom(std::string predicate, std::vector<Term> args);
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conjunction(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr disjunction(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr implication(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr forall(std::string var, FormulaPtr body);
  static FormulaPtr exists(std::string var, FormulaPtr body);

  Kind kind() const { return kind_; }
  const std::string& predicate() const { return symbol_; }
  const std::vector<Term>& args() const { return args_; }
  const std::string& var() const { return symbol_; }
  const FormulaPtr& lhs() const { return lhs_; }
  const FormulaPtr& rhs() const { return rhs_; }
  const FormulaPtr& child() const { return lhs_; }  // negation / quantifier body

  std::string to_string() const;  // parser-compatible, minimal parentheses

 private:
  Formula(Kind kind) : kind_(kind) {}
  static FormulaPtr make_binary(Kind kind, FormulaPtr lhs, FormulaPtr rhs);

  Kind kind_;
  std::string symbol_;      // atom predicate or quantifier variable
  std::vector<Term> args_;  // atom only
  FormulaPtr lhs_, rhs_;
};

bool formulas_equal(const FormulaPtr& a, const FormulaPtr& b);

}  // namespace ltn
