#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltn/kb.hpp"
#include "ltn/logic.hpp"
#include "ltn/tape.hpp"
#include "ltn/tensor.hpp"

namespace ltn {

// Fuzzy disjunction operator used to combine literal values.
enum class SNorm { lukasiewicz, product, goedel };

double snorm_apply(SNorm s, double a, double b);
std::string snorm_name(SNorm s);
std::optional<SNorm> snorm_from_name(const std::string& name);

struct GroundingConfig {
  int n = 30;  // embedding dimension
  int k = 10;  // tensor-network layers
  SNorm s_norm = SNorm::lukasiewicz;
};

// Constant symbols ground to n-vectors; fixed entries never move in training.
struct ConstantGrounding {
  Tensor vector;  // (n)
  bool learnable = true;
};

// Function symbols ground to affine maps v -> M v + N over the concatenated
// argument vectors, or to a named builtin (e.g. vector_sum).
struct FunctionGrounding {
  int arity = 1;
  bool learnable = true;
  Tensor M;  // (n, arity*n)
  Tensor N;  // (n)
  std::string builtin;
};

// Predicate symbols ground to the k-slice tensor network
//   sigma(u^T tanh(v^T W v + V v + B)),
// or to a builtin [0,1]-valued function of the argument vectors.
struct PredicateGrounding {
  int arity = 1;
  bool learnable = true;
  Tensor W;  // (arity*n, arity*n, k)
  Tensor V;  // (k, arity*n)
  Tensor B;  // (k)
  Tensor u;  // (k)
  std::string builtin;
  std::function<double(const std::vector<Tensor>&)> builtin_eval;  // set when builtin
};

// A grounding of the whole signature: the user-fixed part plus the learnable
// extension. Read-shared during evaluation; parameter updates take exclusive
// access between passes.
class GroundingEnv {
 public:
  GroundingEnv() = default;

  const GroundingConfig& config() const { return config_; }
  const Signature& signature() const { return signature_; }

  const ConstantGrounding& constant(const std::string& name) const;
  const FunctionGrounding& function(const std::string& name) const;
  const PredicateGrounding& predicate(const std::string& name) const;

  ConstantGrounding& constant_mut(const std::string& name);
  FunctionGrounding& function_mut(const std::string& name);
  PredicateGrounding& predicate_mut(const std::string& name);

  // Registers a custom fixed predicate evaluator (test and tooling hook).
  void set_predicate_builtin(const std::string& name,
                             std::function<double(const std::vector<Tensor>&)> eval);

  // Learnable tensors in deterministic order: constants, then functions
  // (M before N), then predicates (W, V, B, u), each in declaration order.
  struct ParamRef {
    std::string name;  // e.g. "const:a", "func:_sk0:M", "pred:S:W"
    Tensor* tensor;
  };
  std::vector<ParamRef> learnable_parameters();
  std::vector<std::pair<std::string, const Tensor*>> learnable_parameters_const() const;

  friend GroundingEnv init_env(const Signature&, const GroundingConfig&,
                               const std::map<std::string, FixedGrounding>&, std::uint64_t);

 private:
  GroundingConfig config_;
  Signature signature_;
  std::map<std::string, ConstantGrounding> constants_;
  std::map<std::string, FunctionGrounding> functions_;
  std::map<std::string, PredicateGrounding> predicates_;
};

// Builds a grounding for every signature symbol: fixed entries are taken from
// `fixed` (shape-checked), everything else gets learnable parameters drawn
// from a seeded N(0, 0.1^2). Equal seeds give bit-identical environments.
GroundingEnv init_env(const Signature& signature, const GroundingConfig& config,
                      const std::map<std::string, FixedGrounding>& fixed, std::uint64_t seed);

// Fresh draw of the learnable extension with a new seed; the fixed part
// (vectors, builtins, custom evaluators) carries over unchanged.
GroundingEnv reseed_env(const GroundingEnv& env, std::uint64_t seed);

// Records the grounding of terms, atoms, literals and clauses of one
// evaluation pass onto a tape. Learnable tensors enter as tape parameters
// when `track_parameters` is set (the training path) and as plain inputs
// otherwise. Terms and atoms are memoised per tape, so shared subformulas
// are evaluated once.
class EnvOnTape {
 public:
  EnvOnTape(const GroundingEnv& env, Tape& tape, bool track_parameters);

  NodeId term(const Term& t);  // closed terms only
  NodeId atom(const std::string& predicate, const std::vector<Term>& args);
  NodeId atom_on_vectors(const std::string& predicate, const std::vector<NodeId>& arg_nodes);
  NodeId literal(const Literal& l);
  NodeId clause_value(const Clause& c);  // s-norm fold; clause must be ground

  // Parameter tape nodes aligned with env.learnable_parameters() order.
  const std::vector<std::pair<std::string, NodeId>>& parameter_nodes() const {
    return param_nodes_;
  }
  Tape& tape() { return *tape_; }
  const GroundingEnv& env() const { return *env_; }

 private:
  NodeId tensor_node(const std::string& param_name, const Tensor& value, bool learnable);

  const GroundingEnv* env_;
  Tape* tape_;
  bool track_parameters_;
  std::map<std::string, NodeId> loaded_;      // param/fixed tensor name -> node
  std::map<std::string, NodeId> term_cache_;  // term key -> node
  std::map<std::string, NodeId> atom_cache_;  // atom key -> node
  std::vector<std::pair<std::string, NodeId>> param_nodes_;
};

// One-shot evaluation helpers (fresh internal tape per call).
Tensor ground_term(const Term& term, const GroundingEnv& env);
double ground_atom(const std::string& predicate, const std::vector<Tensor>& arg_vectors,
                   const GroundingEnv& env);
double ground_literal(const Literal& literal, const GroundingEnv& env);
double ground_clause(const Clause& clause, const GroundingEnv& env);

// Applies a learnable function grounding to explicit input vectors: the
// features of the typical object the function maps to (Skolem prediction).
Tensor predict_skolem(const std::string& function, const std::vector<Tensor>& inputs,
                      const GroundingEnv& env);

}  // namespace ltn
