#include "dunm/training.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dunm/random.hpp"

namespace dunm {

OptimizerState make_optimizer(ParameterVector params, AdamConfig config) {
  OptimizerState st;
  st.m.assign(params.size(), 0.0);
  st.v.assign(params.size(), 0.0);
  st.params = std::move(params);
  st.config = config;
  return st;
}

void adam_step(OptimizerState& state, std::span<const double> grad) {
  if (grad.size() != state.params.size())
    throw std::invalid_argument("adam_step: gradient length mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i]))
      throw std::runtime_error("adam_step: non-finite gradient entry at index " +
                               std::to_string(i));
  const AdamConfig& c = state.config;
  state.step_count += 1;
  const double bm_corr = 1.0 - std::pow(c.beta_m, static_cast<double>(state.step_count));
  const double bv_corr = 1.0 - std::pow(c.beta_v, static_cast<double>(state.step_count));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i];
    state.m[i] = c.beta_m * state.m[i] + (1.0 - c.beta_m) * g;
    state.v[i] = c.beta_v * state.v[i] + (1.0 - c.beta_v) * g * g;
    const double m_hat = state.m[i] / bm_corr;
    const double v_hat = state.v[i] / bv_corr;
    state.params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

namespace {

// fixed evaluation point set with precomputed regions and exact values
struct ErrorEvalCache {
  PointSet points;
  std::vector<Region> regions;
  std::vector<double> u_exact;
  double denom_sq = 0.0;  // sum u^2 (uniform box points, constant weight cancels)
};

ErrorEvalCache make_error_cache(const BenchmarkProblem& problem, std::int64_t n_eval,
                                std::uint64_t seed) {
  if (n_eval < 1) throw std::invalid_argument("relative_l2_error: n_eval >= 1");
  ErrorEvalCache cache;
  const int d = problem.dim;
  cache.points.dim = d;
  Rng rng(seed, RngStream::ErrorEval);
  std::vector<double> x(d);
  for (std::int64_t i = 0; i < n_eval; ++i) {
    for (int j = 0; j < d; ++j)
      x[j] = rng.uniform(problem.geom.box.lo[j], problem.geom.box.hi[j]);
    cache.points.push(x);
    const Region r = problem.geom.phi(x) < 0.0 ? Region::Inside : Region::Outside;
    cache.regions.push_back(r);
    const double u = problem.u_exact(r, x);
    cache.u_exact.push_back(u);
    cache.denom_sq += u * u;
  }
  return cache;
}

double error_from_cache(const PiecewiseEvaluator& evaluator,
                        const ErrorEvalCache& cache) {
  double num_sq = 0.0;
  for (std::size_t i = 0; i < cache.points.size(); ++i) {
    const double v = evaluator.value(cache.regions[i], cache.points[i]);
    const double diff = v - cache.u_exact[i];
    num_sq += diff * diff;
  }
  return 100.0 * std::sqrt(num_sq / cache.denom_sq);
}

}  // namespace

double relative_l2_error(const PiecewiseEvaluator& evaluator,
                         const BenchmarkProblem& problem, std::int64_t n_eval,
                         std::uint64_t seed) {
  return error_from_cache(evaluator, make_error_cache(problem, n_eval, seed));
}

TrainResult train(const BenchmarkProblem& problem, NetworkPair start,
                  const NitscheConfig& cfg, const SamplingPlan& plan,
                  const TrainingSchedule& schedule, std::uint64_t sample_seed,
                  std::uint64_t eval_seed, const LossModes& modes,
                  const std::function<void(const TrainingRecord&)>& on_record) {
  if (schedule.resample_every < 1 || schedule.record_every < 1)
    throw std::invalid_argument("train: schedule intervals must be >= 1");
  if (start.inner.arch.input_dim != problem.dim ||
      start.outer.arch.input_dim != problem.dim)
    throw std::invalid_argument("train: network input dimension != problem dimension");

  const std::size_t n_inner = start.inner.params.size();
  std::vector<double> joint;
  joint.reserve(n_inner + start.outer.params.size());
  joint.insert(joint.end(), start.inner.params.begin(), start.inner.params.end());
  joint.insert(joint.end(), start.outer.params.begin(), start.outer.params.end());
  OptimizerState opt = make_optimizer(std::move(joint));

  NetworkPair pair = std::move(start);
  auto sync_pair = [&]() {
    std::copy(opt.params.begin(), opt.params.begin() + n_inner,
              pair.inner.params.begin());
    std::copy(opt.params.begin() + n_inner, opt.params.end(),
              pair.outer.params.begin());
  };

  const ErrorEvalCache eval_cache =
      make_error_cache(problem, schedule.eval_points, eval_seed);
  const DomainSpec spec = problem.domain_spec();

  TrainResult result;
  const auto t0 = std::chrono::steady_clock::now();
  SampleBatch batch;

  for (std::int64_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    if (epoch % schedule.resample_every == 0)
      batch = make_sample_batch(spec, plan, sample_seed, epoch);

    double loss_value = 0.0;
    try {
      auto [lv, grad] =
          discrete_loss_gradient(pair, batch, cfg, problem.measures, problem.data, modes);
      loss_value = lv;
      adam_step(opt, grad);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("training aborted at epoch " + std::to_string(epoch) +
                               " (batch seed " + std::to_string(batch.seed) +
                               ", batch epoch " + std::to_string(batch.epoch) +
                               "): " + e.what());
    }
    sync_pair();

    if ((epoch + 1) % schedule.record_every == 0) {
      TrainingRecord rec;
      rec.epoch = epoch + 1;
      rec.loss = loss_value;
      rec.rel_l2_error_pct = error_from_cache(evaluator_from_pair(pair), eval_cache);
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      result.history.push_back(rec);
      if (on_record) on_record(rec);
    }
  }

  result.pair = std::move(pair);
  return result;
}

}  // namespace dunm
