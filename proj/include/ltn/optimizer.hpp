#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ltn/satisfiability.hpp"

namespace ltn {

struct TrainConfig {
  int steps = 5000;
  double learning_rate = 0.01;
  double decay = 0.9;
  double epsilon = 1e-8;
  double lambda = 1e-10;
  std::uint64_t seed = 0;
  int log_every = 100;
  int restarts = 1;
};

struct TraceRow {
  int step;
  double loss;
  double mean_truth;  // mean aggregated clause truth over kb entries
};

struct TrainTrace {
  std::vector<TraceRow> rows;
};

// Raised when the objective turns non-finite; names the first offending entry.
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& message) : std::runtime_error(message) {}
};

// Per-parameter squared-gradient cache, keyed like learnable_parameters().
struct RmspropState {
  std::map<std::string, Tensor> cache;
};

// cache <- decay*cache + (1-decay)*grad^2; param <- param - lr*grad/sqrt(cache+eps).
void rmsprop_step(const std::vector<GroundingEnv::ParamRef>& params,
                  const std::map<std::string, Tensor>& grads, RmspropState& state,
                  const TrainConfig& config);

struct TrainResult {
  GroundingEnv env;  // best-loss snapshot of the winning restart
  TrainTrace trace;
  double best_loss = 0.0;
  int best_restart = 0;
};

// Full-batch RMSProp on total_loss. Restart 0 starts from theory.env as
// given; restart r re-initialises the learnable extension with seed
// config.seed + r. Restarts run in parallel (capped by LTN_THREADS); the
// winner is the lowest best-snapshot loss, ties to the lowest restart index,
// so the result is scheduling-independent.
TrainResult train(const GroundedTheory& theory, const TrainConfig& config);

}  // namespace ltn
