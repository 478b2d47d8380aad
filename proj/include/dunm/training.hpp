#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dunm/benchmarks.hpp"
#include "dunm/loss.hpp"
#include "dunm/network.hpp"
#include "dunm/sampling.hpp"

namespace dunm {

struct AdamConfig {
  double lr = 0.001;
  double beta_m = 0.9;
  double beta_v = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  ParameterVector params;
  std::vector<double> m, v;  // first/second moment estimates
  std::int64_t step_count = 0;
  AdamConfig config;
};

OptimizerState make_optimizer(ParameterVector params, AdamConfig config = {});

// Bias-corrected update: theta -= lr * m_hat / (sqrt(v_hat) + eps).
// Throws on non-finite gradient entries.
void adam_step(OptimizerState& state, std::span<const double> grad);

struct TrainingRecord {
  std::int64_t epoch = 0;
  double loss = 0.0;
  double rel_l2_error_pct = 0.0;
  double wall_seconds = 0.0;
};

using TrainingHistory = std::vector<TrainingRecord>;

struct TrainingSchedule {
  std::int64_t epochs = 50000;
  std::int64_t resample_every = 10;
  std::int64_t record_every = 100;
  std::int64_t eval_points = 10000;
};

// Monte-Carlo estimate of ||u - u_eval|| / ||u|| over the piecewise L2 norms,
// in percent; the evaluation point set is fixed by the seed.
double relative_l2_error(const PiecewiseEvaluator& evaluator,
                         const BenchmarkProblem& problem, std::int64_t n_eval,
                         std::uint64_t seed);

struct TrainResult {
  NetworkPair pair;
  TrainingHistory history;
};

// One epoch = one full-batch loss/gradient evaluation and one joint ADAM step
// on the concatenated parameters; a fresh batch every resample_every epochs.
TrainResult train(const BenchmarkProblem& problem, NetworkPair start,
                  const NitscheConfig& cfg, const SamplingPlan& plan,
                  const TrainingSchedule& schedule, std::uint64_t sample_seed,
                  std::uint64_t eval_seed, const LossModes& modes = {},
                  const std::function<void(const TrainingRecord&)>& on_record = {});

}  // namespace dunm
