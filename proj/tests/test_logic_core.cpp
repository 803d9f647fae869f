#include <doctest.h>

#include <random>

#include "ltn/normalize.hpp"
#include "oracle_helpers.hpp"

using namespace ltn;

namespace {

Signature smokers_style_signature() {
  Signature sig;
  sig.add_constant_group({"a", "b"});
  sig.add_predicate("A", 1);
  sig.add_predicate("R", 2);
  return sig;
}

}  // namespace

TEST_CASE("skolemisation of an existential under a universal") {
  Signature sig = smokers_style_signature();
  // forall x (A(x) -> exists y R(x,y))  ~>  ~A(x) | R(x, _sk0(x))
  FormulaPtr f = Formula::forall(
      "x", Formula::implication(
               Formula::atom("A", {Term::variable("x")}),
               Formula::exists("y", Formula::atom("R", {Term::variable("x"),
                                                        Term::variable("y")}))));
  NormalizeResult result = normalize(*f, sig);
  REQUIRE(result.clauses.size() == 1);
  const Clause& c = result.clauses[0];
  REQUIRE(c.literals.size() == 2);
  CHECK(c.literals[0] == Literal{true, "A", {Term::variable("x")}});
  CHECK(c.literals[1] ==
        Literal{false, "R",
                {Term::variable("x"), Term::apply("_sk0", {Term::variable("x")})}});
  CHECK(c.free_vars == std::vector<std::string>{"x"});
  CHECK(result.signature.has_function("_sk0"));
  CHECK(result.signature.function_arity("_sk0") == 1);
}

TEST_CASE("clausal input is a fixed point") {
  Signature sig;
  sig.add_constant("a");
  sig.add_predicate("S", 1);
  sig.add_predicate("C", 1);
  FormulaPtr f = Formula::disjunction(
      Formula::negation(Formula::atom("S", {Term::variable("x")})),
      Formula::atom("C", {Term::variable("x")}));
  NormalizeResult result = normalize(*f, sig);
  REQUIRE(result.clauses.size() == 1);
  CHECK(result.clauses[0].literals ==
        std::vector<Literal>{Literal{true, "S", {Term::variable("x")}},
                             Literal{false, "C", {Term::variable("x")}}});
  CHECK(result.signature == sig);  // no fresh symbols
}

TEST_CASE("forall-exists introduces a unary skolem function") {
  Signature sig;
  sig.add_constant("a");
  sig.add_predicate("F", 2);
  FormulaPtr f = Formula::forall(
      "x", Formula::exists(
               "y", Formula::atom("F", {Term::variable("x"), Term::variable("y")})));
  NormalizeResult result = normalize(*f, sig);
  REQUIRE(result.clauses.size() == 1);
  CHECK(result.clauses[0].literals[0] ==
        Literal{false, "F",
                {Term::variable("x"), Term::apply("_sk0", {Term::variable("x")})}});
  CHECK(result.signature.function_arity("_sk0") == 1);
}

TEST_CASE("free variables act as outermost universals for skolemisation") {
  Signature sig;
  sig.add_constant("a");
  sig.add_predicate("F", 2);
  // F(x, y) with free x under an existential: the witness depends on x
  FormulaPtr f = Formula::exists(
      "y", Formula::atom("F", {Term::variable("x"), Term::variable("y")}));
  NormalizeResult result = normalize(*f, sig);
  REQUIRE(result.clauses.size() == 1);
  CHECK(result.clauses[0].literals[0] ==
        Literal{false, "F",
                {Term::variable("x"), Term::apply("_sk0", {Term::variable("x")})}});
  CHECK(result.signature.function_arity("_sk0") == 1);
}

TEST_CASE("skolem numbering continues past taken names") {
  Signature sig;
  sig.add_constant("a");
  sig.add_function("_sk0", 1);
  sig.add_predicate("P", 1);
  FormulaPtr f = Formula::exists("y", Formula::atom("P", {Term::variable("y")}));
  NormalizeResult result = normalize(*f, sig);
  // no universals in scope: the witness is a fresh constant
  CHECK(result.signature.has_constant("_sk1"));
  CHECK(result.clauses[0].literals[0] == Literal{false, "P", {Term::constant("_sk1")}});
}

TEST_CASE("variable scoping violations are rejected, not renamed") {
  Signature sig;
  sig.add_constant("a");
  sig.add_predicate("P", 1);
  sig.add_predicate("Q", 1);

  // nested reuse
  FormulaPtr nested = Formula::forall(
      "x", Formula::forall("x", Formula::atom("P", {Term::variable("x")})));
  CHECK_THROWS_AS(normalize(*nested, sig), std::invalid_argument);

  // sibling reuse
  FormulaPtr sibling = Formula::conjunction(
      Formula::forall("x", Formula::atom("P", {Term::variable("x")})),
      Formula::forall("x", Formula::atom("Q", {Term::variable("x")})));
  CHECK_THROWS_AS(normalize(*sibling, sig), std::invalid_argument);

  // free and bound use of one name
  FormulaPtr mixed = Formula::conjunction(
      Formula::atom("P", {Term::variable("x")}),
      Formula::forall("x", Formula::atom("Q", {Term::variable("x")})));
  CHECK_THROWS_AS(normalize(*mixed, sig), std::invalid_argument);

  // malformed: arity mismatch and unknown predicate
  CHECK_THROWS_AS(normalize(*Formula::atom("P", {Term::constant("a"), Term::constant("a")}), sig),
                  std::invalid_argument);
  CHECK_THROWS_AS(normalize(*Formula::atom("Z", {Term::constant("a")}), sig),
                  std::invalid_argument);
}

TEST_CASE("free_variables on clauses") {
  Clause c1 = Clause::of({Literal{true, "S", {Term::variable("x")}},
                          Literal{false, "C", {Term::variable("x")}}});
  CHECK(free_variables(c1) == std::vector<std::string>{"x"});

  Clause ground = Clause::of({Literal{false, "S", {Term::constant("a")}}});
  CHECK(free_variables(ground).empty());

  Clause swapped = Clause::of({Literal{true, "F", {Term::variable("x"), Term::variable("y")}},
                               Literal{false, "F", {Term::variable("y"), Term::variable("x")}}});
  CHECK(free_variables(swapped) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("instantiate") {
  Clause c = Clause::of({Literal{true, "S", {Term::variable("x")}},
                         Literal{false, "C", {Term::variable("x")}}});
  Clause ground = instantiate(c, {{"x", Term::constant("a")}});
  CHECK(ground.is_ground());
  CHECK(ground.literals[0] == Literal{true, "S", {Term::constant("a")}});
  CHECK(ground.literals[1] == Literal{false, "C", {Term::constant("a")}});

  Clause skolemish =
      Clause::of({Literal{false, "F",
                          {Term::variable("x"), Term::apply("g", {Term::variable("x")})}}});
  Clause b = instantiate(skolemish, {{"x", Term::constant("b")}});
  CHECK(b.literals[0] ==
        Literal{false, "F", {Term::constant("b"), Term::apply("g", {Term::constant("b")})}});

  Clause sym = Clause::of({Literal{true, "F", {Term::variable("x"), Term::variable("y")}},
                           Literal{false, "F", {Term::variable("y"), Term::variable("x")}}});
  Clause ab = instantiate(sym, {{"x", Term::constant("a")}, {"y", Term::constant("b")}});
  CHECK(ab.literals[0] == Literal{true, "F", {Term::constant("a"), Term::constant("b")}});
  CHECK(ab.literals[1] == Literal{false, "F", {Term::constant("b"), Term::constant("a")}});

  CHECK_THROWS_AS(instantiate(sym, {{"x", Term::constant("a")}}), std::invalid_argument);
  CHECK_THROWS_AS(instantiate(c, {{"x", Term::variable("z")}}), std::invalid_argument);
}

TEST_CASE("enumerate_instantiations counts |terms|^|vars|") {
  SUBCASE("two constants, one variable, depth 0") {
    Signature sig;
    sig.add_constant_group({"a", "b"});
    sig.add_predicate("P", 1);
    Clause c = Clause::of({Literal{false, "P", {Term::variable("x")}}});
    auto insts = enumerate_instantiations(c, sig, 0);
    REQUIRE(insts.size() == 2);
    CHECK(insts[0].literals[0] == Literal{false, "P", {Term::constant("a")}});
    CHECK(insts[1].literals[0] == Literal{false, "P", {Term::constant("b")}});
  }
  SUBCASE("eight constants, two variables: 64 ground clauses") {
    Signature sig;
    sig.add_constant_group({"a", "b", "c", "d", "e", "f", "g", "h"});
    sig.add_predicate("F", 2);
    Clause c =
        Clause::of({Literal{false, "F", {Term::variable("x"), Term::variable("y")}}});
    auto insts = enumerate_instantiations(c, sig, 0);
    CHECK(insts.size() == 64);
    // lexicographic: last variable fastest
    CHECK(insts[0].literals[0] ==
          Literal{false, "F", {Term::constant("a"), Term::constant("a")}});
    CHECK(insts[1].literals[0] ==
          Literal{false, "F", {Term::constant("a"), Term::constant("b")}});
    CHECK(insts[8].literals[0] ==
          Literal{false, "F", {Term::constant("b"), Term::constant("a")}});
  }
  SUBCASE("depth 1 adds f(a) to the universe") {
    Signature sig;
    sig.add_constant("a");
    sig.add_function("f", 1);
    sig.add_predicate("P", 1);
    auto universe = closed_terms(sig, 1);
    REQUIRE(universe.size() == 2);
    CHECK(universe[0] == Term::constant("a"));
    CHECK(universe[1] == Term::apply("f", {Term::constant("a")}));

    Clause c = Clause::of({Literal{false, "P", {Term::variable("x")}}});
    CHECK(enumerate_instantiations(c, sig, 1).size() == 2);
    CHECK(enumerate_instantiations(c, sig, 2).size() == 3);  // + f(f(a))
  }
  SUBCASE("no constants means no universe") {
    Signature sig;
    sig.add_predicate("P", 1);
    Clause c = Clause::of({Literal{false, "P", {Term::variable("x")}}});
    CHECK_THROWS_AS(enumerate_instantiations(c, sig, 0), std::invalid_argument);
  }
}

TEST_CASE("instantiate after enumerate yields only closed clauses") {
  Signature sig;
  sig.add_constant_group({"a", "b", "c"});
  sig.add_function("f", 2);
  sig.add_predicate("R", 2);
  Clause c = Clause::of({Literal{false, "R", {Term::variable("x"), Term::variable("y")}},
                         Literal{true, "R", {Term::variable("y"), Term::variable("x")}}});
  auto universe = closed_terms(sig, 1);
  auto insts = enumerate_instantiations(c, sig, 1);
  CHECK(insts.size() == universe.size() * universe.size());
  for (const Clause& inst : insts) CHECK(inst.is_ground());
}

TEST_CASE("normalize is idempotent on random clausal input") {
  std::mt19937_64 rng(11);
  Signature sig;
  sig.add_constant_group({"a", "b", "c"});
  sig.add_predicate("P", 1);
  sig.add_predicate("Q", 1);
  sig.add_predicate("R", 2);
  std::uniform_int_distribution<int> coin(0, 1), pred3(0, 2), term5(0, 4);
  const std::vector<Term> terms = {Term::constant("a"), Term::constant("b"),
                                   Term::constant("c"), Term::variable("x"),
                                   Term::variable("y")};

  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> size(1, 4);
    const int lits = size(rng);
    FormulaPtr f;
    std::vector<Literal> expected;
    for (int i = 0; i < lits; ++i) {
      const int which = pred3(rng);
      std::string pred = which == 0 ? "P" : which == 1 ? "Q" : "R";
      std::vector<Term> args = {terms[static_cast<std::size_t>(term5(rng))]};
      if (pred == "R") args.push_back(terms[static_cast<std::size_t>(term5(rng))]);
      const bool neg = coin(rng) == 1;
      FormulaPtr atom = Formula::atom(pred, args);
      if (neg) atom = Formula::negation(atom);
      expected.push_back(Literal{neg, pred, args});
      f = f ? Formula::disjunction(std::move(f), std::move(atom)) : std::move(atom);
    }
    NormalizeResult once = normalize(*f, sig);
    REQUIRE(once.clauses.size() == 1);
    CHECK(once.clauses[0].literals == expected);
    CHECK(once.signature == sig);
  }
}

TEST_CASE("normalised semantics matches classical semantics (brute force)") {
  using namespace ltn::testing;
  Signature sig;
  sig.add_constant_group({"a", "b", "c"});
  sig.add_predicate("P", 1);
  sig.add_predicate("Q", 1);
  sig.add_predicate("R", 2);

  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> kind(0, 5), coin(0, 1);

  // Random formulas over ground atoms and universally closed variables; no
  // existentials, so normalisation preserves classical equivalence exactly.
  std::function<FormulaPtr(int, const std::vector<std::string>&)> gen =
      [&](int depth, const std::vector<std::string>& vars) -> FormulaPtr {
    const int k = depth == 0 ? 0 : kind(rng);
    if (k <= 1) {  // atom
      auto term = [&]() {
        if (!vars.empty() && coin(rng) == 1) {
          std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
          return Term::variable(vars[pick(rng)]);
        }
        std::uniform_int_distribution<int> c3(0, 2);
        return Term::constant(std::string(1, static_cast<char>('a' + c3(rng))));
      };
      switch (kind(rng) % 3) {
        case 0: return Formula::atom("P", {term()});
        case 1: return Formula::atom("Q", {term()});
        default: return Formula::atom("R", {term(), term()});
      }
    }
    if (k == 2) return Formula::negation(gen(depth - 1, vars));
    FormulaPtr lhs = gen(depth - 1, vars);
    FormulaPtr rhs = gen(depth - 1, vars);
    if (k == 3) return Formula::conjunction(std::move(lhs), std::move(rhs));
    if (k == 4) return Formula::disjunction(std::move(lhs), std::move(rhs));
    return Formula::implication(std::move(lhs), std::move(rhs));
  };

  const auto atom_keys = all_ground_atom_keys(sig);
  REQUIRE(atom_keys.size() == 3 + 3 + 9);

  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::string> vars;
    if (trial % 3 == 1) vars = {"x"};
    if (trial % 3 == 2) vars = {"x", "y"};
    FormulaPtr body = gen(2, vars);
    FormulaPtr f = body;
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) f = Formula::forall(*it, f);

    NormalizeResult norm = normalize(*f, sig);
    REQUIRE(norm.signature == sig);

    // collect the atoms this formula actually touches, enumerate exhaustively
    std::vector<std::string> touched;
    for (const Clause& c : norm.clauses)
      for (const auto& inst : enumerate_instantiations(c, sig, 0))
        for (const Literal& lit : inst.literals) {
          std::map<std::string, Term> none;
          const std::string key = ground_atom_key(lit.predicate, lit.args, none);
          if (std::find(touched.begin(), touched.end(), key) == touched.end())
            touched.push_back(key);
        }
    if (touched.size() > 12) continue;  // keep the truth table small

    for (std::uint64_t bits = 0; bits < (1ull << touched.size()); ++bits) {
      Assignment assignment;
      for (const auto& key : atom_keys) assignment[key] = false;
      for (std::size_t i = 0; i < touched.size(); ++i)
        assignment[touched[i]] = ((bits >> i) & 1) != 0;
      std::map<std::string, Term> binding;
      const bool classical = eval_formula_classical(*f, sig, assignment, binding);
      const bool clausal = eval_clauses_classical(norm.clauses, sig, assignment);
      REQUIRE(classical == clausal);
      ++checked;
    }
  }
  CHECK(checked > 1000);
}
