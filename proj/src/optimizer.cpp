#include "ltn/optimizer.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

namespace ltn {

void rmsprop_step(const std::vector<GroundingEnv::ParamRef>& params,
                  const std::map<std::string, Tensor>& grads, RmspropState& state,
                  const TrainConfig& config) {
  for (const auto& ref : params) {
    auto git = grads.find(ref.name);
    if (git == grads.end())
      throw std::invalid_argument("rmsprop_step: no gradient for '" + ref.name + "'");
    const Tensor& g = git->second;
    Tensor& p = *ref.tensor;
    if (!g.same_shape(p))
      throw std::invalid_argument("rmsprop_step: gradient shape " + g.shape_str() +
                                  " does not match parameter '" + ref.name + "' " +
                                  p.shape_str());
    Tensor& cache = state.cache.try_emplace(ref.name, Tensor::zeros_like(p)).first->second;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      cache.data[i] = config.decay * cache.data[i] + (1.0 - config.decay) * g.data[i] * g.data[i];
      p.data[i] -= config.learning_rate * g.data[i] / std::sqrt(cache.data[i] + config.epsilon);
    }
  }
}

namespace {

struct StepEval {
  double loss = 0.0;
  double mean_truth = 0.0;
};

// One full-batch pass over the theory; entry truths come off the same tape.
StepEval evaluate(GroundedTheory& theory, double lambda, bool want_grads,
                  std::map<std::string, Tensor>* grads) {
  Tape tape;
  EnvOnTape scope(theory.env, tape, true);
  std::vector<NodeId> truths;
  NodeId loss_node = total_loss_node(scope, theory, lambda, &truths);

  StepEval eval;
  eval.loss = tape.value(loss_node).item();
  double truth_sum = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double v = tape.value(truths[i]).item();
    if (!std::isfinite(v))
      throw TrainingError("non-finite truth value for clause '" + theory.kb[i].label + "'");
    truth_sum += v;
  }
  if (!std::isfinite(eval.loss)) throw TrainingError("non-finite training loss");
  eval.mean_truth = truths.empty() ? 0.0 : truth_sum / static_cast<double>(truths.size());

  if (want_grads) {
    grads->clear();
    auto by_node = tape.gradients(loss_node);
    for (const auto& [name, node] : scope.parameter_nodes()) {
      auto it = by_node.find(node);
      if (it != by_node.end()) grads->emplace(name, std::move(it->second));
    }
  }
  return eval;
}

struct RestartOutcome {
  GroundingEnv best_env;
  TrainTrace trace;
  double best_loss = std::numeric_limits<double>::infinity();
};

RestartOutcome run_restart(GroundedTheory theory, const TrainConfig& config) {
  RestartOutcome out;
  RmspropState state;
  std::map<std::string, Tensor> grads;

  for (int step = 0; step < config.steps; ++step) {
    StepEval eval = evaluate(theory, config.lambda, true, &grads);
    if (eval.loss < out.best_loss) {
      out.best_loss = eval.loss;
      out.best_env = theory.env;
    }
    if (config.log_every > 0 && step % config.log_every == 0)
      out.trace.rows.push_back(TraceRow{step, eval.loss, eval.mean_truth});
    auto params = theory.env.learnable_parameters();
    rmsprop_step(params, grads, state, config);
  }

  // Score the final parameters too, so the snapshot covers every state seen.
  StepEval final_eval = evaluate(theory, config.lambda, false, nullptr);
  if (final_eval.loss < out.best_loss) {
    out.best_loss = final_eval.loss;
    out.best_env = theory.env;
  }
  out.trace.rows.push_back(TraceRow{config.steps, final_eval.loss, final_eval.mean_truth});
  return out;
}

int parallelism_cap() {
  if (const char* env = std::getenv("LTN_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

TrainResult train(const GroundedTheory& theory, const TrainConfig& config) {
  if (config.steps < 0) throw std::invalid_argument("train: steps must be >= 0");
  if (config.learning_rate <= 0) throw std::invalid_argument("train: learning_rate must be > 0");
  if (config.decay <= 0 || config.decay >= 1)
    throw std::invalid_argument("train: decay must lie in (0, 1)");
  if (config.epsilon <= 0) throw std::invalid_argument("train: epsilon must be > 0");
  if (config.lambda < 0) throw std::invalid_argument("train: lambda must be >= 0");
  const int restarts = std::max(1, config.restarts);

  // Restart 0 trains the environment exactly as handed in; restart r > 0
  // re-draws the learnable extension with seed config.seed + r.
  std::vector<GroundedTheory> attempts;
  attempts.reserve(static_cast<std::size_t>(restarts));
  attempts.push_back(theory);
  for (int r = 1; r < restarts; ++r) {
    GroundedTheory t = theory;
    t.env = reseed_env(theory.env, config.seed + static_cast<std::uint64_t>(r));
    attempts.push_back(std::move(t));
  }

  std::vector<RestartOutcome> outcomes(attempts.size());
  std::vector<std::exception_ptr> failures(attempts.size());
  const int cap = std::min<int>(parallelism_cap(), restarts);
  if (cap <= 1) {
    for (std::size_t r = 0; r < attempts.size(); ++r)
      outcomes[r] = run_restart(std::move(attempts[r]), config);
  } else {
    std::size_t next = 0;
    std::mutex mu;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(cap));
    for (int w = 0; w < cap; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          std::size_t r;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= attempts.size()) return;
            r = next++;
          }
          try {
            outcomes[r] = run_restart(std::move(attempts[r]), config);
          } catch (...) {
            failures[r] = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& failure : failures)
      if (failure) std::rethrow_exception(failure);
  }

  // Lowest loss wins, ties to the lowest restart index, so the choice does
  // not depend on thread scheduling.
  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r)
    if (outcomes[r].best_loss < outcomes[best].best_loss) best = r;

  TrainResult result;
  result.env = std::move(outcomes[best].best_env);
  result.trace = std::move(outcomes[best].trace);
  result.best_loss = outcomes[best].best_loss;
  result.best_restart = static_cast<int>(best);
  return result;
}

}  // namespace ltn
