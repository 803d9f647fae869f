#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ltn/grounding.hpp"
#include "oracle_helpers.hpp"

using namespace ltn;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

GroundingEnv example1_env(SNorm s_norm = SNorm::goedel) {
  KbDocument doc = parse_kb(read_file(std::string(LTN_CORPUS_DIR) + "/example1_documents.kb"));
  GroundingConfig config;
  config.n = *doc.embedding_dim;
  config.k = 1;
  config.s_norm = s_norm;
  return init_env(doc.signature, config, doc.fixed, 0);
}

Term concat_o1_o2() {
  return Term::apply("concat", {Term::constant("o1"), Term::constant("o2")});
}

}  // namespace

TEST_CASE("example 1: bag-of-words semantics end to end") {
  GroundingEnv env = example1_env();

  SUBCASE("constants return their fixed vectors") {
    CHECK(ground_term(Term::constant("o1"), env).data ==
          std::vector<double>{1, 0, 1, 1, 0, 1, 1, 1, 0});
  }
  SUBCASE("concat grounds to the vector sum") {
    CHECK(ground_term(concat_o1_o2(), env).data ==
          std::vector<double>{1, 1, 2, 2, 1, 2, 2, 1, 0});
  }
  SUBCASE("Sim grounds to cosine similarity") {
    Tensor u = ground_term(concat_o1_o2(), env);
    Tensor o3 = ground_term(Term::constant("o3"), env);
    CHECK(ground_atom("Sim", {u, o3}, env) == doctest::Approx(13.0 / 14.832397).epsilon(1e-4));
    CHECK(ground_atom("Sim", {u, o3}, env) == doctest::Approx(0.88).epsilon(0.006));
  }
  SUBCASE("negated literal complements the atom") {
    Literal lit{true, "Sim", {Term::constant("o1"), Term::constant("o3")}};
    // cos(o1, o3) = 7 / (sqrt(6) sqrt(11)) ~ 0.8616
    CHECK(ground_literal(lit, env) == doctest::Approx(1.0 - 0.8616).epsilon(1e-3));
  }
  SUBCASE("Goedel disjunction takes the max") {
    Tensor o2 = ground_term(Term::constant("o2"), env);
    Tensor o3 = ground_term(Term::constant("o3"), env);
    CHECK(ground_atom("Sim", {o2, o3}, env) == doctest::Approx(0.73).epsilon(0.012));
    Clause c = Clause::of(
        {Literal{false, "Sim", {Term::constant("o1"), Term::constant("o3")}},
         Literal{false, "Sim", {Term::constant("o2"), Term::constant("o3")}}});
    CHECK(ground_clause(c, env) == doctest::Approx(0.86).epsilon(0.006));
  }
}

TEST_CASE("init_env shapes, seeding and errors") {
  SUBCASE("empty signature gives an empty environment") {
    GroundingEnv env = init_env(Signature{}, GroundingConfig{4, 2, SNorm::lukasiewicz}, {}, 1);
    CHECK(env.learnable_parameters().empty());
  }
  SUBCASE("equal seeds are bit-identical, different seeds are not") {
    Signature sig;
    sig.add_constant_group({"a", "b"});
    sig.add_predicate("P", 1);
    GroundingConfig config{3, 2, SNorm::lukasiewicz};
    GroundingEnv e1 = init_env(sig, config, {}, 99);
    GroundingEnv e2 = init_env(sig, config, {}, 99);
    GroundingEnv e3 = init_env(sig, config, {}, 100);
    CHECK(e1.constant("a").vector.data == e2.constant("a").vector.data);
    CHECK(e1.predicate("P").W.data == e2.predicate("P").W.data);
    CHECK(e1.constant("a").vector.data != e3.constant("a").vector.data);
  }
  SUBCASE("smokers-scale shapes follow n and k") {
    KbDocument doc = parse_kb(read_file(std::string(LTN_CORPUS_DIR) + "/smokers_exp1.kb"));
    GroundingEnv env = init_env(doc.signature, GroundingConfig{30, 10, SNorm::lukasiewicz}, {}, 7);
    CHECK(env.signature().constants().size() == 14);
    for (const auto& c : env.signature().constants())
      CHECK(env.constant(c).vector.shape == std::vector<std::size_t>{30});
    CHECK(env.predicate("F").W.shape == std::vector<std::size_t>{60, 60, 10});
    CHECK(env.predicate("F").V.shape == std::vector<std::size_t>{10, 60});
    CHECK(env.predicate("S").W.shape == std::vector<std::size_t>{30, 30, 10});
    CHECK(env.predicate("S").u.shape == std::vector<std::size_t>{10});
  }
  SUBCASE("fixed grounding shape mismatch is rejected") {
    Signature sig;
    sig.add_constant("a");
    std::map<std::string, FixedGrounding> fixed;
    fixed.emplace("a", FixedGrounding{FixedGrounding::Kind::vector,
                                      Tensor::vector({1.0, 2.0}), ""});
    CHECK_THROWS_AS(init_env(sig, GroundingConfig{3, 1, SNorm::lukasiewicz}, fixed, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("ground_term on learnable functions") {
  Signature sig;
  sig.add_constant("a");
  sig.add_function("f", 1);
  GroundingEnv env = init_env(sig, GroundingConfig{3, 1, SNorm::lukasiewicz}, {}, 5);

  SUBCASE("zero affine map sends everything to zero") {
    FunctionGrounding& f = env.function_mut("f");
    f.M = Tensor({3, 3});
    f.N = Tensor({3});
    CHECK(ground_term(Term::apply("f", {Term::constant("a")}), env).data ==
          std::vector<double>{0, 0, 0});
  }
  SUBCASE("open terms are rejected") {
    CHECK_THROWS_AS(ground_term(Term::variable("x"), env), std::invalid_argument);
    CHECK_THROWS_AS(ground_term(Term::apply("f", {Term::variable("x")}), env),
                    std::invalid_argument);
  }
}

TEST_CASE("ground_atom") {
  Signature sig;
  sig.add_constant_group({"a", "b"});
  sig.add_predicate("P", 2);
  GroundingEnv env = init_env(sig, GroundingConfig{3, 4, SNorm::lukasiewicz}, {}, 17);

  SUBCASE("u = 0 pins the output at 0.5") {
    env.predicate_mut("P").u = Tensor({4});
    const double v =
        ground_atom("P", {env.constant("a").vector, env.constant("b").vector}, env);
    CHECK(v == doctest::Approx(0.5));
  }
  SUBCASE("matches a straight-line transcription of the formula") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      PredicateGrounding& p = env.predicate_mut("P");
      for (double& v : p.W.data) v = dist(rng);
      for (double& v : p.V.data) v = dist(rng);
      for (double& v : p.B.data) v = dist(rng);
      for (double& v : p.u.data) v = dist(rng);
      std::vector<double> concat(6);
      for (double& v : concat) v = dist(rng);
      Tensor va = Tensor::vector({concat[0], concat[1], concat[2]});
      Tensor vb = Tensor::vector({concat[3], concat[4], concat[5]});
      const double expect = ltn::testing::ntn_reference(p.W, p.V, p.B, p.u, concat);
      const double got = ground_atom("P", {va, vb}, env);
      CHECK(got == doctest::Approx(expect).epsilon(1e-12));
      CHECK(got > 0.0);
      CHECK(got < 1.0);
    }
  }
  SUBCASE("arity mismatch is rejected") {
    CHECK_THROWS_AS(ground_atom("P", {env.constant("a").vector}, env), std::invalid_argument);
  }
}

TEST_CASE("s-norm algebra on a grid") {
  const std::vector<SNorm> norms = {SNorm::lukasiewicz, SNorm::product, SNorm::goedel};
  const int steps = 25;
  auto grid = [&](int i) { return static_cast<double>(i) / steps; };

  for (SNorm s : norms) {
    for (int i = 0; i <= steps; ++i) {
      const double x = grid(i);
      CHECK(snorm_apply(s, 0.0, x) == doctest::Approx(x).epsilon(1e-12));  // identity 0
      CHECK(snorm_apply(s, 1.0, x) == doctest::Approx(1.0).epsilon(1e-12));
      for (int j = 0; j <= steps; ++j) {
        const double y = grid(j);
        CHECK(snorm_apply(s, x, y) == doctest::Approx(snorm_apply(s, y, x)).epsilon(1e-12));
        for (int l = 0; l <= steps; l += 5) {
          const double z = grid(l);
          CHECK(snorm_apply(s, snorm_apply(s, x, y), z) ==
                doctest::Approx(snorm_apply(s, x, snorm_apply(s, y, z))).epsilon(1e-12));
        }
        if (j > 0)  // monotone in each argument
          CHECK(snorm_apply(s, x, y) >= snorm_apply(s, x, grid(j - 1)) - 1e-12);
      }
    }
  }

  // pointwise order: goedel <= product <= lukasiewicz
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j) {
      const double x = grid(i), y = grid(j);
      const double g = snorm_apply(SNorm::goedel, x, y);
      const double p = snorm_apply(SNorm::product, x, y);
      const double l = snorm_apply(SNorm::lukasiewicz, x, y);
      CHECK(g <= p + 1e-12);
      CHECK(p <= l + 1e-12);
    }
}

TEST_CASE("clause values stay in [0,1] and fold per s-norm") {
  Signature sig;
  sig.add_constant_group({"a", "b"});
  sig.add_predicate("P", 1);
  sig.add_predicate("Q", 1);

  // pin atom values through custom builtins
  auto with_values = [&](SNorm s, double p_val, double q_val) {
    GroundingEnv env = init_env(sig, GroundingConfig{2, 1, s}, {}, 0);
    env.set_predicate_builtin("P", [p_val](const std::vector<Tensor>&) { return p_val; });
    env.set_predicate_builtin("Q", [q_val](const std::vector<Tensor>&) { return q_val; });
    return env;
  };

  Clause pq = Clause::of({Literal{false, "P", {Term::constant("a")}},
                          Literal{false, "Q", {Term::constant("a")}}});
  Clause single = Clause::of({Literal{false, "P", {Term::constant("a")}}});

  CHECK(ground_clause(pq, with_values(SNorm::lukasiewicz, 0.6, 0.7)) == doctest::Approx(1.0));
  CHECK(ground_clause(pq, with_values(SNorm::product, 0.6, 0.7)) ==
        doctest::Approx(0.6 + 0.7 - 0.42));
  CHECK(ground_clause(pq, with_values(SNorm::goedel, 0.6, 0.7)) == doctest::Approx(0.7));
  CHECK(ground_clause(single, with_values(SNorm::goedel, 0.37, 0.0)) == doctest::Approx(0.37));

  // random learnable env: every literal/clause value lands in [0,1]
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    GroundingEnv env = init_env(sig, GroundingConfig{3, 2, SNorm::lukasiewicz}, {}, rng());
    for (const Clause* c : {&pq, &single}) {
      const double v = ground_clause(*c, env);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("predict_skolem applies the affine map") {
  Signature sig;
  sig.add_constant("a");
  sig.add_function("f", 1);
  sig.add_predicate("P", 1);
  GroundingEnv env = init_env(sig, GroundingConfig{3, 1, SNorm::lukasiewicz}, {}, 2);

  SUBCASE("identity map returns its input") {
    FunctionGrounding& f = env.function_mut("f");
    f.M = Tensor({3, 3});
    f.M.data = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    f.N = Tensor({3});
    Tensor in = Tensor::vector({0.25, -1.5, 3.0});
    CHECK(predict_skolem("f", {in}, env).data == in.data);
  }
  SUBCASE("output has shape (n)") {
    CHECK(predict_skolem("f", {Tensor::vector({1, 2, 3})}, env).shape ==
          std::vector<std::size_t>{3});
  }
  SUBCASE("unknown or non-learnable symbols are rejected") {
    CHECK_THROWS_AS(predict_skolem("g", {Tensor::vector({1, 2, 3})}, env),
                    std::invalid_argument);
    KbDocument doc =
        parse_kb(read_file(std::string(LTN_CORPUS_DIR) + "/example1_documents.kb"));
    GroundingEnv fixed_env =
        init_env(doc.signature, GroundingConfig{9, 1, SNorm::goedel}, doc.fixed, 0);
    CHECK_THROWS_AS(predict_skolem("concat", {Tensor({9}), Tensor({9})}, fixed_env),
                    std::invalid_argument);
  }
}

TEST_CASE("builtin predicates refuse learnable inputs during recording") {
  Signature sig;
  sig.add_constant_group({"a", "b"});
  sig.add_predicate("Sim", 2);
  std::map<std::string, FixedGrounding> fixed;
  fixed.emplace("Sim", FixedGrounding{FixedGrounding::Kind::builtin, Tensor(), "cosine"});
  GroundingEnv env = init_env(sig, GroundingConfig{3, 1, SNorm::goedel}, fixed, 4);

  Tape tape;
  EnvOnTape scope(env, tape, true);  // constants load as learnable parameters here
  CHECK_THROWS_AS(scope.atom("Sim", {Term::constant("a"), Term::constant("b")}),
                  std::invalid_argument);

  // evaluation-only recording is fine
  Tape eval_tape;
  EnvOnTape eval_scope(env, eval_tape, false);
  const double v =
      eval_tape.value(eval_scope.atom("Sim", {Term::constant("a"), Term::constant("b")})).item();
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);
}
