#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ltn/kb.hpp"

using namespace ltn;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("minimal document with a default-interval fact") {
  KbDocument doc = parse_kb("pred S/1. const a. S(a).");
  CHECK(doc.signature.has_predicate("S"));
  CHECK(doc.signature.constants() == std::vector<std::string>{"a"});
  REQUIRE(doc.entries.size() == 1);
  CHECK(doc.entries[0].interval == Interval{1.0, 1.0});
  CHECK(doc.entries[0].formula->to_string() == "S(a)");
}

TEST_CASE("explicit confidence interval on an axiom") {
  KbDocument doc = parse_kb(
      "pred S/1. pred C/1. const a.\n"
      "[0.7,1.0] forall x: S(x) -> C(x).");
  REQUIRE(doc.entries.size() == 1);
  CHECK(doc.entries[0].interval.lo == doctest::Approx(0.7));
  CHECK(doc.entries[0].interval.hi == doctest::Approx(1.0));
  CHECK(doc.entries[0].formula->to_string() == "forall x: S(x) -> C(x)");
}

TEST_CASE("figure-2 corpus files parse to the expected counts") {
  KbDocument facts = parse_kb(read_file(std::string(LTN_CORPUS_DIR) + "/smokers_exp1.kb"));
  CHECK(facts.signature.constants().size() == 14);
  REQUIRE(facts.signature.constant_groups().size() == 2);
  CHECK(facts.signature.constant_groups()[0].size() == 8);
  CHECK(facts.signature.constant_groups()[1].size() == 6);
  CHECK(facts.signature.predicate_arity("S") == 1);
  CHECK(facts.signature.predicate_arity("C") == 1);
  CHECK(facts.signature.predicate_arity("F") == 2);
  // 8 smoking + 8 cancer + 28 friendship facts in a..h, 6 + 14 in i..n.
  CHECK(facts.entries.size() == 64);

  KbDocument axioms = parse_kb(read_file(std::string(LTN_CORPUS_DIR) + "/smokers_axioms.kb"));
  CHECK(axioms.entries.size() == 5);

  KbDocument merged = merge_documents({facts, axioms});
  CHECK(merged.entries.size() == 69);
  CHECK(merged.signature.constants().size() == 14);
}

TEST_CASE("example-1 document carries its fixed groundings") {
  KbDocument doc = parse_kb(read_file(std::string(LTN_CORPUS_DIR) + "/example1_documents.kb"));
  REQUIRE(doc.embedding_dim.has_value());
  CHECK(*doc.embedding_dim == 9);
  REQUIRE(doc.fixed.count("o1") == 1);
  CHECK(doc.fixed.at("o1").vector.data ==
        std::vector<double>{1, 0, 1, 1, 0, 1, 1, 1, 0});
  CHECK(doc.fixed.at("concat").builtin == "vector_sum");
  CHECK(doc.fixed.at("Sim").builtin == "cosine");
}

TEST_CASE("serialisation round-trips") {
  SUBCASE("empty document is just the header") {
    CHECK(serialize_kb(KbDocument{}) == "# ltn knowledge base\n");
    CHECK(parse_kb(serialize_kb(KbDocument{})) == KbDocument{});
  }
  SUBCASE("fixed vector groundings survive exactly") {
    KbDocument doc = parse_kb("const a. ground a = [1, 0, 1].");
    KbDocument again = parse_kb(serialize_kb(doc));
    CHECK(again == doc);
    CHECK(again.fixed.at("a").vector.data == std::vector<double>{1, 0, 1});
  }
  SUBCASE("the corpus round-trips to the same entries") {
    for (const char* name : {"smokers_exp1.kb", "smokers_axioms.kb", "example1_documents.kb"}) {
      KbDocument doc = parse_kb(read_file(std::string(LTN_CORPUS_DIR) + "/" + name));
      KbDocument again = parse_kb(serialize_kb(doc));
      CHECK(again == doc);
    }
  }
}

TEST_CASE("parse . serialize is the identity on generated documents") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coin(0, 1), small(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int trial = 0; trial < 50; ++trial) {
    KbDocument doc;
    doc.signature.add_predicate("P0", 1);  // used by every generated entry
    const int extra_preds = small(rng) - 1;
    for (int i = 0; i < extra_preds; ++i)
      doc.signature.add_predicate("P" + std::to_string(i + 1), small(rng) > 2 ? 2 : 1);
    doc.signature.add_constant_group({"a", "b"});
    if (coin(rng)) doc.signature.add_constant("c");
    if (coin(rng)) doc.signature.add_function("f", 1);
    if (coin(rng)) doc.embedding_dim = small(rng);
    if (coin(rng)) {
      FixedGrounding g;
      g.kind = FixedGrounding::Kind::vector;
      g.vector = Tensor::vector({unit(rng), unit(rng) * 1e-3, -unit(rng)});
      doc.fixed.emplace("a", std::move(g));
    }

    const int entries = small(rng);
    for (int e = 0; e < entries; ++e) {
      std::vector<Term> args = {coin(rng) ? Term::constant("a") : Term::variable("x")};
      FormulaPtr f = Formula::atom("P0", args);
      if (doc.signature.has_function("f") && coin(rng))
        f = Formula::atom("P0", {Term::apply("f", {Term::constant("b")})});
      if (coin(rng)) f = Formula::negation(f);
      if (coin(rng)) f = Formula::implication(f, Formula::atom("P0", {Term::constant("b")}));
      if (coin(rng))
        f = Formula::conjunction(
            f, Formula::disjunction(Formula::atom("P0", {Term::constant("a")}),
                                    Formula::atom("P0", {Term::constant("b")})));
      bool has_x = f->to_string().find("x") != std::string::npos;
      if (has_x && coin(rng)) f = Formula::forall("x", f);
      Interval interval;
      if (coin(rng)) {
        interval.lo = std::round(unit(rng) * 50) / 100.0;
        interval.hi = interval.lo + std::round(unit(rng) * 50) / 100.0;
      }
      doc.entries.push_back(KbEntry{interval, std::move(f)});
    }

    KbDocument again = parse_kb(serialize_kb(doc));
    CHECK(again == doc);
  }
}

TEST_CASE("operator precedence and parentheses") {
  Signature sig;
  sig.add_constant("a");
  sig.add_predicate("P", 1);
  sig.add_predicate("Q", 1);
  sig.add_predicate("R", 1);

  // -> binds loosest and associates right; & binds tighter than |
  FormulaPtr f = parse_formula("P(a) -> Q(a) -> R(a)", sig);
  CHECK(f->to_string() == "P(a) -> Q(a) -> R(a)");
  CHECK(f->kind() == Formula::Kind::implication);
  CHECK(f->rhs()->kind() == Formula::Kind::implication);

  FormulaPtr g = parse_formula("P(a) | Q(a) & R(a)", sig);
  CHECK(g->kind() == Formula::Kind::disjunction);
  CHECK(g->rhs()->kind() == Formula::Kind::conjunction);

  FormulaPtr h = parse_formula("(P(a) -> Q(a)) -> R(a)", sig);
  CHECK(h->lhs()->kind() == Formula::Kind::implication);
  CHECK(h->to_string() == "(P(a) -> Q(a)) -> R(a)");

  FormulaPtr negs = parse_formula("~~P(a)", sig);
  CHECK(negs->kind() == Formula::Kind::negation);
  CHECK(negs->child()->kind() == Formula::Kind::negation);
}

TEST_CASE("parse errors carry positions inside the offending token") {
  SUBCASE("syntax error") {
    try {
      parse_kb("pred S/1.\nconst a.\nS(a) S(a).");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 3);
      CHECK(e.column == 6);  // the second S
    }
  }
  SUBCASE("undeclared symbol") {
    try {
      parse_kb("pred S/1. const a. T(a).");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 1);
      CHECK(e.column == 20);
      CHECK(std::string(e.what()).find("undeclared") != std::string::npos);
    }
  }
  SUBCASE("arity mismatch") {
    CHECK_THROWS_AS(parse_kb("pred S/1. const a. S(a, a)."), ParseError);
    CHECK_THROWS_AS(parse_kb("pred S/2. const a. S(a)."), ParseError);
  }
  SUBCASE("bad intervals") {
    CHECK_THROWS_AS(parse_kb("pred S/1. const a. [0.9, 0.2] S(a)."), ParseError);
    CHECK_THROWS_AS(parse_kb("pred S/1. const a. [0.1, 1.5] S(a)."), ParseError);
    CHECK_THROWS_AS(parse_kb("pred S/1. const a. [-0.2, 0.5] S(a)."), ParseError);
  }
  SUBCASE("duplicate declarations") {
    CHECK_THROWS_AS(parse_kb("pred S/1. pred S/1."), ParseError);
    CHECK_THROWS_AS(parse_kb("const a. func a/1."), ParseError);
  }
  SUBCASE("grounding rules") {
    CHECK_THROWS_AS(parse_kb("const a. ground b = [1]."), ParseError);
    CHECK_THROWS_AS(parse_kb("pred S/1. ground S = [1]."), ParseError);
    CHECK_THROWS_AS(parse_kb("const a. ground a = builtin(cosine)."), ParseError);
  }
}

TEST_CASE("merge rejects conflicting declarations") {
  KbDocument a = parse_kb("pred S/1. const a.");
  KbDocument b = parse_kb("pred S/2. const b.");
  CHECK_THROWS_AS(merge_documents({a, b}), std::invalid_argument);

  KbDocument c = parse_kb("pred S/1. const a. ground a = [1].");
  KbDocument d = parse_kb("pred S/1. const a. ground a = [2].");
  CHECK_THROWS_AS(merge_documents({c, d}), std::invalid_argument);
  KbDocument e = parse_kb("pred S/1. const a. ground a = [1].");
  CHECK(merge_documents({c, e}).fixed.at("a").vector.data == std::vector<double>{1.0});
}
