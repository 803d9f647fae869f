#include "ltn/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ltn {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kModelVersion = 1;

Json tensor_to_json(const Tensor& t) {
  Json j;
  j["shape"] = t.shape;
  j["data"] = t.data;
  return j;
}

Tensor tensor_from_json(const Json& j) {
  Tensor t;
  t.shape = j.at("shape").get<std::vector<std::size_t>>();
  t.data = j.at("data").get<std::vector<double>>();
  if (t.data.size() != shape_numel(t.shape))
    throw std::invalid_argument("model: tensor data does not match its shape");
  return t;
}

}  // namespace

std::string model_to_json(const GroundingEnv& env) {
  const Signature& sig = env.signature();
  Json j;
  j["format"] = "ltn-model";
  j["version"] = kModelVersion;
  j["config"] = {{"n", env.config().n},
                 {"k", env.config().k},
                 {"s_norm", snorm_name(env.config().s_norm)}};

  Json jsig;
  jsig["constant_groups"] = sig.constant_groups();
  Json jfuncs = Json::array();
  for (const auto& [name, arity] : sig.functions()) jfuncs.push_back({{"name", name}, {"arity", arity}});
  jsig["functions"] = jfuncs;
  Json jpreds = Json::array();
  for (const auto& [name, arity] : sig.predicates()) jpreds.push_back({{"name", name}, {"arity", arity}});
  jsig["predicates"] = jpreds;
  j["signature"] = jsig;

  Json jconsts = Json::object();
  for (const auto& name : sig.constants()) {
    const ConstantGrounding& g = env.constant(name);
    Json one;
    one["learnable"] = g.learnable;
    one["vector"] = tensor_to_json(g.vector);
    jconsts[name] = one;
  }
  j["constants"] = jconsts;

  Json jfs = Json::object();
  for (const auto& [name, arity] : sig.functions()) {
    const FunctionGrounding& g = env.function(name);
    Json one;
    one["learnable"] = g.learnable;
    if (g.learnable) {
      one["M"] = tensor_to_json(g.M);
      one["N"] = tensor_to_json(g.N);
    } else {
      one["builtin"] = g.builtin;
    }
    jfs[name] = one;
  }
  j["functions"] = jfs;

  Json jps = Json::object();
  for (const auto& [name, arity] : sig.predicates()) {
    const PredicateGrounding& g = env.predicate(name);
    Json one;
    one["learnable"] = g.learnable;
    if (g.learnable) {
      one["W"] = tensor_to_json(g.W);
      one["V"] = tensor_to_json(g.V);
      one["B"] = tensor_to_json(g.B);
      one["u"] = tensor_to_json(g.u);
    } else {
      if (g.builtin == "custom")
        throw std::invalid_argument("model: custom predicate evaluators cannot be saved");
      one["builtin"] = g.builtin;
    }
    jps[name] = one;
  }
  j["predicates"] = jps;

  return j.dump(2) + "\n";
}

GroundingEnv model_from_json(const std::string& json_text) {
  Json j = Json::parse(json_text);
  if (j.value("format", "") != "ltn-model")
    throw std::invalid_argument("model: not an ltn-model file");
  if (j.value("version", 0) != kModelVersion)
    throw std::invalid_argument("model: unsupported version");

  GroundingConfig config;
  config.n = j.at("config").at("n").get<int>();
  config.k = j.at("config").at("k").get<int>();
  auto snorm = snorm_from_name(j.at("config").at("s_norm").get<std::string>());
  if (!snorm) throw std::invalid_argument("model: unknown s_norm");
  config.s_norm = *snorm;

  Signature sig;
  for (const auto& group : j.at("signature").at("constant_groups"))
    sig.add_constant_group(group.get<std::vector<std::string>>());
  for (const auto& f : j.at("signature").at("functions"))
    sig.add_function(f.at("name").get<std::string>(), f.at("arity").get<int>());
  for (const auto& p : j.at("signature").at("predicates"))
    sig.add_predicate(p.at("name").get<std::string>(), p.at("arity").get<int>());

  // Rebuild through init_env so every invariant check runs, then overwrite
  // the learnable tensors with the stored values.
  std::map<std::string, FixedGrounding> fixed;
  for (const auto& [name, one] : j.at("functions").items())
    if (!one.at("learnable").get<bool>())
      fixed.emplace(name, FixedGrounding{FixedGrounding::Kind::builtin, Tensor(),
                                         one.at("builtin").get<std::string>()});
  for (const auto& [name, one] : j.at("predicates").items())
    if (!one.at("learnable").get<bool>())
      fixed.emplace(name, FixedGrounding{FixedGrounding::Kind::builtin, Tensor(),
                                         one.at("builtin").get<std::string>()});
  for (const auto& [name, one] : j.at("constants").items())
    if (!one.at("learnable").get<bool>())
      fixed.emplace(name, FixedGrounding{FixedGrounding::Kind::vector,
                                         tensor_from_json(one.at("vector")), ""});

  GroundingEnv env = init_env(sig, config, fixed, 0);

  auto check_shape = [](const Tensor& stored, const Tensor& expected, const std::string& what) {
    if (stored.shape != expected.shape)
      throw std::invalid_argument("model: " + what + " has shape " + stored.shape_str() +
                                  ", expected " + expected.shape_str());
  };

  for (const auto& [name, one] : j.at("constants").items()) {
    if (!one.at("learnable").get<bool>()) continue;
    Tensor v = tensor_from_json(one.at("vector"));
    check_shape(v, env.constant(name).vector, "constant " + name);
    env.constant_mut(name).vector = std::move(v);
  }
  for (const auto& [name, one] : j.at("functions").items()) {
    if (!one.at("learnable").get<bool>()) continue;
    FunctionGrounding& g = env.function_mut(name);
    Tensor m = tensor_from_json(one.at("M"));
    Tensor n = tensor_from_json(one.at("N"));
    check_shape(m, g.M, "function " + name + " M");
    check_shape(n, g.N, "function " + name + " N");
    g.M = std::move(m);
    g.N = std::move(n);
  }
  for (const auto& [name, one] : j.at("predicates").items()) {
    if (!one.at("learnable").get<bool>()) continue;
    PredicateGrounding& g = env.predicate_mut(name);
    Tensor w = tensor_from_json(one.at("W"));
    Tensor v = tensor_from_json(one.at("V"));
    Tensor b = tensor_from_json(one.at("B"));
    Tensor u = tensor_from_json(one.at("u"));
    check_shape(w, g.W, "predicate " + name + " W");
    check_shape(v, g.V, "predicate " + name + " V");
    check_shape(b, g.B, "predicate " + name + " B");
    check_shape(u, g.u, "predicate " + name + " u");
    g.W = std::move(w);
    g.V = std::move(v);
    g.B = std::move(b);
    g.u = std::move(u);
  }
  return env;
}

void save_model(const GroundingEnv& env, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  out << model_to_json(env);
}

GroundingEnv load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace ltn
