#include "ltn/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ltn/rng.hpp"

namespace ltn {

// ------------------------------------------------------------------ s-norms

double snorm_apply(SNorm s, double a, double b) {
  switch (s) {
    case SNorm::lukasiewicz: return std::min(1.0, a + b);
    case SNorm::product: return a + b - a * b;
    case SNorm::goedel: return std::max(a, b);
  }
  return 0.0;
}

std::string snorm_name(SNorm s) {
  switch (s) {
    case SNorm::lukasiewicz: return "lukasiewicz";
    case SNorm::product: return "product";
    case SNorm::goedel: return "goedel";
  }
  return "?";
}

std::optional<SNorm> snorm_from_name(const std::string& name) {
  if (name == "lukasiewicz" || name == "luk") return SNorm::lukasiewicz;
  if (name == "product" || name == "prod") return SNorm::product;
  if (name == "goedel" || name == "godel" || name == "max") return SNorm::goedel;
  return std::nullopt;
}

// ----------------------------------------------------------------- builtins

namespace {

double cosine_clipped(const std::vector<Tensor>& args) {
  if (args.size() != 2) throw std::invalid_argument("cosine expects two argument vectors");
  const Tensor& a = args[0];
  const Tensor& b = args[1];
  if (!a.same_shape(b))
    throw std::invalid_argument("cosine: shape mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    dot += a.data[i] * b.data[i];
    na += a.data[i] * a.data[i];
    nb += b.data[i] * b.data[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  // Predicates take values in [0,1]; negative similarity clips to 0.
  return std::clamp(c, 0.0, 1.0);
}

bool is_builtin_function(const std::string& name) {
  return name == "vector_sum" || name == "sum";
}

bool is_builtin_predicate(const std::string& name) { return name == "cosine"; }

}  // namespace

// ------------------------------------------------------------- GroundingEnv

const ConstantGrounding& GroundingEnv::constant(const std::string& name) const {
  auto it = constants_.find(name);
  if (it == constants_.end()) throw std::invalid_argument("no grounding for constant '" + name + "'");
  return it->second;
}

const FunctionGrounding& GroundingEnv::function(const std::string& name) const {
  auto it = functions_.find(name);
  if (it == functions_.end()) throw std::invalid_argument("no grounding for function '" + name + "'");
  return it->second;
}

const PredicateGrounding& GroundingEnv::predicate(const std::string& name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end())
    throw std::invalid_argument("no grounding for predicate '" + name + "'");
  return it->second;
}

ConstantGrounding& GroundingEnv::constant_mut(const std::string& name) {
  return const_cast<ConstantGrounding&>(constant(name));
}
FunctionGrounding& GroundingEnv::function_mut(const std::string& name) {
  return const_cast<FunctionGrounding&>(function(name));
}
PredicateGrounding& GroundingEnv::predicate_mut(const std::string& name) {
  return const_cast<PredicateGrounding&>(predicate(name));
}

void GroundingEnv::set_predicate_builtin(
    const std::string& name, std::function<double(const std::vector<Tensor>&)> eval) {
  PredicateGrounding& p = predicate_mut(name);
  p.learnable = false;
  p.builtin = "custom";
  p.builtin_eval = std::move(eval);
  p.W = p.V = p.B = p.u = Tensor();
}

std::vector<GroundingEnv::ParamRef> GroundingEnv::learnable_parameters() {
  std::vector<ParamRef> out;
  for (const auto& c : signature_.constants()) {
    ConstantGrounding& g = constants_.at(c);
    if (g.learnable) out.push_back({"const:" + c, &g.vector});
  }
  for (const auto& [f, arity] : signature_.functions()) {
    FunctionGrounding& g = functions_.at(f);
    if (g.learnable) {
      out.push_back({"func:" + f + ":M", &g.M});
      out.push_back({"func:" + f + ":N", &g.N});
    }
  }
  for (const auto& [p, arity] : signature_.predicates()) {
    PredicateGrounding& g = predicates_.at(p);
    if (g.learnable) {
      out.push_back({"pred:" + p + ":W", &g.W});
      out.push_back({"pred:" + p + ":V", &g.V});
      out.push_back({"pred:" + p + ":B", &g.B});
      out.push_back({"pred:" + p + ":u", &g.u});
    }
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> GroundingEnv::learnable_parameters_const()
    const {
  auto& self = const_cast<GroundingEnv&>(*this);
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (const auto& ref : self.learnable_parameters()) out.emplace_back(ref.name, ref.tensor);
  return out;
}

GroundingEnv init_env(const Signature& signature, const GroundingConfig& config,
                      const std::map<std::string, FixedGrounding>& fixed, std::uint64_t seed) {
  if (config.n < 1 || config.k < 1)
    throw std::invalid_argument("grounding config requires n >= 1 and k >= 1");

  GroundingEnv env;
  env.config_ = config;
  env.signature_ = signature;
  const std::size_t n = static_cast<std::size_t>(config.n);
  const std::size_t k = static_cast<std::size_t>(config.k);

  GaussianSource gauss(seed);
  auto draw = [&gauss](Tensor& t) {
    for (double& v : t.data) v = gauss.next(0.0, 0.1);
  };

  for (const auto& name : signature.constants()) {
    ConstantGrounding g;
    auto it = fixed.find(name);
    if (it != fixed.end()) {
      if (it->second.kind != FixedGrounding::Kind::vector)
        throw std::invalid_argument("constant '" + name + "' needs a vector grounding");
      if (it->second.vector.data.size() != n)
        throw std::invalid_argument("fixed grounding for '" + name + "' has " +
                                    std::to_string(it->second.vector.data.size()) +
                                    " components, expected n=" + std::to_string(n));
      g.vector = it->second.vector;
      g.vector.shape = {n};
      g.learnable = false;
    } else {
      g.vector = Tensor({n});
      draw(g.vector);
    }
    env.constants_.emplace(name, std::move(g));
  }

  for (const auto& [name, arity] : signature.functions()) {
    FunctionGrounding g;
    g.arity = arity;
    auto it = fixed.find(name);
    if (it != fixed.end()) {
      if (it->second.kind != FixedGrounding::Kind::builtin)
        throw std::invalid_argument("function '" + name + "' needs a builtin grounding");
      if (!is_builtin_function(it->second.builtin))
        throw std::invalid_argument("unknown builtin function '" + it->second.builtin + "'");
      g.learnable = false;
      g.builtin = it->second.builtin;
    } else {
      g.M = Tensor({n, static_cast<std::size_t>(arity) * n});
      g.N = Tensor({n});
      draw(g.M);
      draw(g.N);
    }
    env.functions_.emplace(name, std::move(g));
  }

  for (const auto& [name, arity] : signature.predicates()) {
    PredicateGrounding g;
    g.arity = arity;
    auto it = fixed.find(name);
    if (it != fixed.end()) {
      if (it->second.kind != FixedGrounding::Kind::builtin)
        throw std::invalid_argument("predicate '" + name + "' needs a builtin grounding");
      if (!is_builtin_predicate(it->second.builtin))
        throw std::invalid_argument("unknown builtin predicate '" + it->second.builtin + "'");
      if (arity != 2)
        throw std::invalid_argument("builtin cosine requires a binary predicate");
      g.learnable = false;
      g.builtin = it->second.builtin;
      g.builtin_eval = cosine_clipped;
    } else {
      const std::size_t d = static_cast<std::size_t>(arity) * n;
      g.W = Tensor({d, d, k});
      g.V = Tensor({k, d});
      g.B = Tensor({k});
      g.u = Tensor({k});
      draw(g.W);
      draw(g.V);
      draw(g.B);
      draw(g.u);
    }
    env.predicates_.emplace(name, std::move(g));
  }

  return env;
}

GroundingEnv reseed_env(const GroundingEnv& env, std::uint64_t seed) {
  std::map<std::string, FixedGrounding> fixed;
  std::vector<std::pair<std::string, std::function<double(const std::vector<Tensor>&)>>> custom;
  const Signature& sig = env.signature();
  for (const auto& name : sig.constants()) {
    const ConstantGrounding& g = env.constant(name);
    if (!g.learnable)
      fixed.emplace(name, FixedGrounding{FixedGrounding::Kind::vector, g.vector, ""});
  }
  for (const auto& [name, arity] : sig.functions()) {
    const FunctionGrounding& g = env.function(name);
    if (!g.learnable)
      fixed.emplace(name, FixedGrounding{FixedGrounding::Kind::builtin, Tensor(), g.builtin});
  }
  for (const auto& [name, arity] : sig.predicates()) {
    const PredicateGrounding& g = env.predicate(name);
    if (g.learnable) continue;
    if (g.builtin == "custom")
      custom.emplace_back(name, g.builtin_eval);
    else
      fixed.emplace(name, FixedGrounding{FixedGrounding::Kind::builtin, Tensor(), g.builtin});
  }
  GroundingEnv fresh = init_env(sig, env.config(), fixed, seed);
  for (auto& [name, eval] : custom) fresh.set_predicate_builtin(name, std::move(eval));
  return fresh;
}

// ----------------------------------------------------------------- EnvOnTape

EnvOnTape::EnvOnTape(const GroundingEnv& env, Tape& tape, bool track_parameters)
    : env_(&env), tape_(&tape), track_parameters_(track_parameters) {
  if (track_parameters_) {
    for (const auto& [name, tensor] : env.learnable_parameters_const()) {
      NodeId node = tape_->parameter(*tensor);
      loaded_.emplace(name, node);
      param_nodes_.emplace_back(name, node);
    }
  }
}

NodeId EnvOnTape::tensor_node(const std::string& param_name, const Tensor& value,
                              bool learnable) {
  auto it = loaded_.find(param_name);
  if (it != loaded_.end()) return it->second;
  NodeId node;
  if (learnable && track_parameters_) {
    // Registered in the constructor; only reachable when the env gained
    // parameters after construction, which is a caller bug.
    throw std::logic_error("parameter '" + param_name + "' not registered on tape");
  }
  node = tape_->input(value);
  loaded_.emplace(param_name, node);
  return node;
}

NodeId EnvOnTape::term(const Term& t) {
  if (!t.is_closed())
    throw std::invalid_argument("ground_term: term '" + t.to_string() + "' is not closed");
  const std::string key = t.to_string();
  auto cached = term_cache_.find(key);
  if (cached != term_cache_.end()) return cached->second;

  NodeId node;
  if (t.kind() == Term::Kind::constant) {
    const ConstantGrounding& g = env_->constant(t.symbol());
    node = tensor_node("const:" + t.symbol(), g.vector, g.learnable);
  } else {
    const FunctionGrounding& g = env_->function(t.symbol());
    if (static_cast<int>(t.args().size()) != g.arity)
      throw std::invalid_argument("function '" + t.symbol() + "' arity mismatch");
    std::vector<NodeId> parts;
    parts.reserve(t.args().size());
    for (const Term& a : t.args()) parts.push_back(term(a));
    if (!g.learnable) {
      // vector_sum is the only builtin function; it is tape-expressible.
      node = parts[0];
      for (std::size_t i = 1; i < parts.size(); ++i) node = tape_->add(node, parts[i]);
    } else {
      NodeId v = parts.size() == 1 ? parts[0] : tape_->concat(parts);
      NodeId m = tensor_node("func:" + t.symbol() + ":M", g.M, true);
      NodeId b = tensor_node("func:" + t.symbol() + ":N", g.N, true);
      node = tape_->add(tape_->matvec(m, v), b);
    }
  }
  term_cache_.emplace(key, node);
  return node;
}

NodeId EnvOnTape::atom_on_vectors(const std::string& predicate,
                                  const std::vector<NodeId>& arg_nodes) {
  const PredicateGrounding& g = env_->predicate(predicate);
  if (static_cast<int>(arg_nodes.size()) != g.arity)
    throw std::invalid_argument("predicate '" + predicate + "' expects " +
                                std::to_string(g.arity) + " argument(s), got " +
                                std::to_string(arg_nodes.size()));
  if (!g.learnable) {
    // Builtin predicates evaluate outside the tape; they are fixed, so this
    // is only sound when no learnable grounding feeds them.
    std::vector<Tensor> args;
    args.reserve(arg_nodes.size());
    for (NodeId id : arg_nodes) {
      if (tape_->depends_on_parameters(id))
        throw std::invalid_argument("builtin predicate '" + predicate +
                                    "' cannot sit over learnable groundings");
      args.push_back(tape_->value(id));
    }
    return tape_->input(Tensor::scalar(g.builtin_eval(args)));
  }
  NodeId v = arg_nodes.size() == 1 ? arg_nodes[0] : tape_->concat(arg_nodes);
  NodeId w = tensor_node("pred:" + predicate + ":W", g.W, true);
  NodeId vt = tensor_node("pred:" + predicate + ":V", g.V, true);
  NodeId b = tensor_node("pred:" + predicate + ":B", g.B, true);
  NodeId u = tensor_node("pred:" + predicate + ":u", g.u, true);
  NodeId pre = tape_->add(tape_->add(tape_->bilinear(v, w, v), tape_->matvec(vt, v)), b);
  return tape_->sigmoid(tape_->dot(u, tape_->tanh(pre)));
}

NodeId EnvOnTape::atom(const std::string& predicate, const std::vector<Term>& args) {
  std::string key = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) key += ",";
    key += args[i].to_string();
  }
  key += ")";
  auto cached = atom_cache_.find(key);
  if (cached != atom_cache_.end()) return cached->second;

  std::vector<NodeId> arg_nodes;
  arg_nodes.reserve(args.size());
  for (const Term& t : args) arg_nodes.push_back(term(t));
  NodeId node = atom_on_vectors(predicate, arg_nodes);
  atom_cache_.emplace(std::move(key), node);
  return node;
}

NodeId EnvOnTape::literal(const Literal& l) {
  NodeId a = atom(l.predicate, l.args);
  return l.negated ? tape_->one_minus(a) : a;
}

NodeId EnvOnTape::clause_value(const Clause& c) {
  if (!c.is_ground())
    throw std::invalid_argument("clause_value: clause '" + c.to_string() + "' has free variables");
  std::vector<NodeId> lits;
  lits.reserve(c.literals.size());
  for (const Literal& l : c.literals) lits.push_back(literal(l));
  if (lits.size() == 1) return lits[0];

  switch (env_->config().s_norm) {
    case SNorm::lukasiewicz: {
      NodeId acc = lits[0];
      for (std::size_t i = 1; i < lits.size(); ++i) acc = tape_->add(acc, lits[i]);
      return tape_->min_clamp1(acc);
    }
    case SNorm::product: {
      NodeId acc = lits[0];
      for (std::size_t i = 1; i < lits.size(); ++i) {
        // a + b - a*b
        acc = tape_->sub(tape_->add(acc, lits[i]), tape_->mul(acc, lits[i]));
      }
      return acc;
    }
    case SNorm::goedel: {
      NodeId acc = lits[0];
      for (std::size_t i = 1; i < lits.size(); ++i) acc = tape_->max(acc, lits[i]);
      return acc;
    }
  }
  throw std::logic_error("unknown s-norm");
}

// ------------------------------------------------------- one-shot wrappers

Tensor ground_term(const Term& term, const GroundingEnv& env) {
  Tape tape;
  EnvOnTape scope(env, tape, false);
  return tape.value(scope.term(term));
}

double ground_atom(const std::string& predicate, const std::vector<Tensor>& arg_vectors,
                   const GroundingEnv& env) {
  Tape tape;
  EnvOnTape scope(env, tape, false);
  std::vector<NodeId> nodes;
  nodes.reserve(arg_vectors.size());
  for (const Tensor& t : arg_vectors) nodes.push_back(tape.input(t));
  return tape.value(scope.atom_on_vectors(predicate, nodes)).item();
}

double ground_literal(const Literal& literal, const GroundingEnv& env) {
  Tape tape;
  EnvOnTape scope(env, tape, false);
  return tape.value(scope.literal(literal)).item();
}

double ground_clause(const Clause& clause, const GroundingEnv& env) {
  Tape tape;
  EnvOnTape scope(env, tape, false);
  return tape.value(scope.clause_value(clause)).item();
}

Tensor predict_skolem(const std::string& function, const std::vector<Tensor>& inputs,
                      const GroundingEnv& env) {
  const FunctionGrounding& g = env.function(function);
  if (!g.learnable)
    throw std::invalid_argument("predict_skolem: '" + function + "' is not a learnable function");
  if (static_cast<int>(inputs.size()) != g.arity)
    throw std::invalid_argument("predict_skolem: '" + function + "' expects " +
                                std::to_string(g.arity) + " input vector(s)");
  Tape tape;
  std::vector<NodeId> parts;
  parts.reserve(inputs.size());
  for (const Tensor& t : inputs) parts.push_back(tape.input(t));
  NodeId v = parts.size() == 1 ? parts[0] : tape.concat(parts);
  NodeId out = tape.add(tape.matvec(tape.input(g.M), v), tape.input(g.N));
  return tape.value(out);
}

}  // namespace ltn
