#include <algorithm>
#include <stdexcept>
#include <cmath>
#include <stdexcept>
#include <numeric>

#include "doctest.h"
#include "dunm/autodiff.hpp"
#include "dunm/benchmarks.hpp"
#include "dunm/experiment.hpp"
#include "dunm/loss.hpp"
#include "dunm/random.hpp"

using namespace dunm;

namespace {

double rel_err(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// piecewise-constant evaluator with zero gradients
PiecewiseEvaluator const_evaluator(int dim, double inside, double outside) {
  PiecewiseEvaluator ev;
  ev.eval = [dim, inside, outside](Region r, std::span<const double>) {
    return DualPoint{r == Region::Inside ? inside : outside,
                     std::vector<double>(dim, 0.0)};
  };
  ev.value = [inside, outside](Region r, std::span<const double>) {
    return r == Region::Inside ? inside : outside;
  };
  return ev;
}

// same smooth field on both sides (continuous across the interface)
PiecewiseEvaluator smooth_evaluator() {
  PiecewiseEvaluator ev;
  ev.eval = [](Region, std::span<const double> x) {
    DualPoint d;
    d.value = std::sin(x[0]) * std::cos(x[1]);
    d.tangent = {std::cos(x[0]) * std::cos(x[1]), -std::sin(x[0]) * std::sin(x[1])};
    return d;
  };
  ev.value = [](Region, std::span<const double> x) {
    return std::sin(x[0]) * std::cos(x[1]);
  };
  return ev;
}

SampleBatch tiny_batch() {
  SampleBatch b;
  b.inner.dim = b.outer.dim = b.interface_pts.dim = b.boundary.dim = 2;
  b.inner.coords = {0.1, 0.1};
  b.outer.coords = {0.8, 0.8};
  b.interface_pts.coords = {0.5, 0.0};
  b.interface_normals = {1.0, 0.0};
  b.boundary.coords = {1.0, 0.3};
  return b;
}

ProblemData zero_data() {
  ProblemData d;
  d.f = [](Region, std::span<const double>) { return 0.0; };
  d.p = [](std::span<const double>) { return 0.0; };
  d.q = [](std::span<const double>) { return 0.0; };
  d.g = [](std::span<const double>) { return 0.0; };
  return d;
}

}  // namespace

TEST_CASE("kappa weights") {
  const Kappa even = kappa({1.0, 1.0, 0.0, 0.0});
  CHECK(even.k1 == 0.5);
  CHECK(even.k2 == 0.5);

  const Kappa k = kappa({1.0, 10.0, 0.0, 0.0});
  CHECK(k.k1 == doctest::Approx(10.0 / 11.0).epsilon(1e-15));
  CHECK(k.k2 == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  CHECK(k.k1 + k.k2 == 1.0);

  const Kappa h = kappa({1000.0, 1.0, 0.0, 0.0});
  CHECK(h.k1 == doctest::Approx(1.0 / 1001.0).epsilon(1e-15));
  CHECK(h.k2 == doctest::Approx(1000.0 / 1001.0).epsilon(1e-15));
  CHECK(h.k1 + h.k2 == 1.0);

  CHECK_THROWS_AS(kappa({0.0, 1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(NitscheConfig{1.0, 1.0, -1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("jump, weighted and dual averages") {
  CHECK(jump(3.0, 3.0) == 0.0);
  CHECK(jump(1.0, 4.0) == 3.0);
  const Kappa k{10.0 / 11.0, 1.0 / 11.0};
  CHECK(weighted_avg(2.0, 4.0, k) == doctest::Approx(24.0 / 11.0).epsilon(1e-15));
  CHECK(dual_avg(2.0, 4.0, k) == doctest::Approx(42.0 / 11.0).epsilon(1e-15));

  // duality: avg + dual = w1 + w2
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Kappa kk = kappa({rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0), 0, 0});
    const double w1 = rng.uniform(-5.0, 5.0), w2 = rng.uniform(-5.0, 5.0);
    CHECK(rel_err(weighted_avg(w1, w2, kk) + dual_avg(w1, w2, kk), w1 + w2) < 1e-14);
  }
}

TEST_CASE("discrete_loss: all-zero inputs give exactly zero") {
  const SampleBatch batch = tiny_batch();
  const GeometryMeasures meas{1.0, 1.0, 1.0, 1.0};
  const NitscheConfig cfg{1.0, 1.0, 1000.0, 500.0};
  CHECK(discrete_loss(evaluator_zero(2), batch, cfg, meas, zero_data()) == 0.0);
}

TEST_CASE("discrete_loss: hand-checked single interface point") {
  const SampleBatch batch = tiny_batch();
  const GeometryMeasures meas{1.0, 1.0, 1.0, 1.0};
  const NitscheConfig cfg{1.0, 1.0, 2.0, 3.0};
  ProblemData data = zero_data();
  data.g = [](std::span<const double>) { return 2.0; };  // matches u2

  // u1 = 1, u2 = 2, zero gradients: only the interface penalty survives,
  // (gamma_f/2)(jump - p)^2 = (2/2)(2-1)^2 = 1
  const double loss =
      discrete_loss(const_evaluator(2, 1.0, 2.0), batch, cfg, meas, data);
  CHECK(loss == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discrete_loss degenerates to the Ritz energy for continuous fields") {
  const BenchmarkProblem pb = circle_problem(1.0, 1.0);
  SamplingPlan plan{128, 32, 16, 0};
  const SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 5, 0);
  const PiecewiseEvaluator ev = smooth_evaluator();
  ProblemData data = zero_data();
  data.g = [ev](std::span<const double> x) { return ev.value(Region::Outside, x); };

  const NitscheConfig with_pen{1.0, 1.0, 1000.0, 700.0};
  const NitscheConfig no_pen{1.0, 1.0, 0.0, 700.0};
  // interface terms vanish identically for a continuous field with p = q = 0
  const double a = discrete_loss(ev, batch, with_pen, pb.measures, data);
  const double b = discrete_loss(ev, batch, no_pen, pb.measures, data);
  CHECK(a == b);
  // and the boundary penalty vanishes because g matches the trace
  const NitscheConfig no_b{1.0, 1.0, 1000.0, 0.0};
  CHECK(discrete_loss(ev, batch, no_b, pb.measures, data) == a);
}

TEST_CASE("discrete_loss rejects empty point classes") {
  SampleBatch batch = tiny_batch();
  batch.interface_pts.coords.clear();
  batch.interface_normals.clear();
  const GeometryMeasures meas{1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(
      discrete_loss(evaluator_zero(2), batch, {1, 1, 1, 1}, meas, zero_data()),
      std::invalid_argument);
}

TEST_CASE("quadratic structure: second difference is independent of the data") {
  const BenchmarkProblem pb = circle_problem(1.0, 1000.0);
  SamplingPlan plan{256, 64, 32, 0};
  const SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 8, 0);
  const NitscheConfig cfg = pb.config_defaults;

  const PiecewiseEvaluator u = random_bubble_direction(pb, 100);
  const PiecewiseEvaluator v = random_bubble_direction(pb, 200);
  const PiecewiseEvaluator up = evaluator_axpy(u, 1.0, v);
  const PiecewiseEvaluator um = evaluator_axpy(u, -1.0, v);

  auto second_diff = [&](const ProblemData& data) {
    return discrete_loss(up, batch, cfg, pb.measures, data) +
           discrete_loss(um, batch, cfg, pb.measures, data) -
           2.0 * discrete_loss(u, batch, cfg, pb.measures, data);
  };
  const double with_data = second_diff(pb.data);
  const double without_data = second_diff(zero_data());
  CHECK(rel_err(with_data, without_data) < 1e-10);
}

TEST_CASE("loss is invariant under point reordering within a class") {
  const BenchmarkProblem pb = flower_problem();
  SamplingPlan plan{200, 50, 20, 0};
  SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 13, 0);
  const PiecewiseEvaluator ev = evaluator_from_exact(pb);
  const double before =
      discrete_loss(ev, batch, pb.config_defaults, pb.measures, pb.data);

  // reverse the inner points and the interface points (with their normals
  // and arclength factors)
  const int d = batch.dim();
  auto reverse_points = [d](PointSet& ps) {
    const std::size_t n = ps.size();
    PointSet out{d, {}};
    for (std::size_t i = n; i-- > 0;) out.push(ps[i]);
    ps = std::move(out);
  };
  reverse_points(batch.inner);
  reverse_points(batch.interface_pts);
  std::vector<double> nrm(batch.interface_normals.size());
  const std::size_t nf = batch.nf();
  for (std::size_t i = 0; i < nf; ++i)
    for (int j = 0; j < d; ++j)
      nrm[i * d + j] = batch.interface_normals[(nf - 1 - i) * d + j];
  batch.interface_normals = std::move(nrm);
  std::reverse(batch.interface_arclength.begin(), batch.interface_arclength.end());

  const double after =
      discrete_loss(ev, batch, pb.config_defaults, pb.measures, pb.data);
  CHECK(rel_err(after, before) < 1e-12);
}

TEST_CASE("gradient of the full loss matches finite differences") {
  const BenchmarkProblem pb = flower_problem();
  SamplingPlan plan{8, 4, 4, 0};
  const SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 3, 0);

  const NetworkArch arch{2, 4, 2, Activation::Tanh};
  NetworkPair pair;
  pair.inner = Network{arch, xavier_init(arch, 10)};
  pair.outer = Network{arch, xavier_init(arch, 20)};

  auto [value, grad] = discrete_loss_gradient(pair, batch, pb.config_defaults,
                                              pb.measures, pb.data);

  // the plain path doubles as the value cross-check
  const double plain =
      discrete_loss(evaluator_from_pair(pair), batch, pb.config_defaults,
                    pb.measures, pb.data);
  CHECK(rel_err(value, plain) < 1e-12);

  const std::size_t n_inner = pair.inner.params.size();
  auto loss_at = [&](std::span<const double> joint) {
    NetworkPair p2 = pair;
    std::copy(joint.begin(), joint.begin() + n_inner, p2.inner.params.begin());
    std::copy(joint.begin() + n_inner, joint.end(), p2.outer.params.begin());
    return discrete_loss(evaluator_from_pair(p2), batch, pb.config_defaults,
                         pb.measures, pb.data);
  };
  std::vector<double> joint(pair.inner.params);
  joint.insert(joint.end(), pair.outer.params.begin(), pair.outer.params.end());
  const GradientVector fd = finite_difference_gradient(loss_at, joint, 1e-4);

  double scale = 1e-6;
  for (double v : fd) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < fd.size(); ++i)
    worst = std::max(worst, std::abs(grad[i] - fd[i]) /
                                std::max({std::abs(fd[i]), std::abs(grad[i]),
                                          1e-8 * scale}));
  CHECK(worst < 1e-5);
}

TEST_CASE("gradient matches finite differences in flux q-variant mode") {
  const BenchmarkProblem pb = flower_problem();  // nonzero q exercises the branch
  SamplingPlan plan{8, 4, 4, 0};
  const SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 3, 0);
  LossModes modes;
  modes.q_variant = QTermVariant::FluxDualAverage;

  const NetworkArch arch{2, 3, 1, Activation::Tanh};
  NetworkPair pair;
  pair.inner = Network{arch, xavier_init(arch, 77)};
  pair.outer = Network{arch, xavier_init(arch, 78)};
  auto [value, grad] = discrete_loss_gradient(pair, batch, pb.config_defaults,
                                              pb.measures, pb.data, modes);
  (void)value;

  const std::size_t n_inner = pair.inner.params.size();
  auto loss_at = [&](std::span<const double> joint) {
    NetworkPair p2 = pair;
    std::copy(joint.begin(), joint.begin() + n_inner, p2.inner.params.begin());
    std::copy(joint.begin() + n_inner, joint.end(), p2.outer.params.begin());
    return discrete_loss(evaluator_from_pair(p2), batch, pb.config_defaults,
                         pb.measures, pb.data, modes);
  };
  std::vector<double> joint(pair.inner.params);
  joint.insert(joint.end(), pair.outer.params.begin(), pair.outer.params.end());
  const GradientVector fd = finite_difference_gradient(loss_at, joint, 1e-4);
  for (std::size_t i = 0; i < fd.size(); ++i)
    CHECK(std::abs(grad[i] - fd[i]) <=
          1e-5 * std::max({std::abs(fd[i]), std::abs(grad[i]), 1e-6}));
}

TEST_CASE("interface weight modes coincide on the circle") {
  const BenchmarkProblem pb = circle_problem(1.0, 10.0);
  SamplingPlan plan{64, 16, 8, 0};
  const SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 4, 0);
  const PiecewiseEvaluator ev = evaluator_from_exact(pb);
  LossModes corrected, paper;
  paper.paper_interface_weights = true;
  const double a = discrete_loss(ev, batch, pb.config_defaults, pb.measures, pb.data,
                                 corrected);
  const double b =
      discrete_loss(ev, batch, pb.config_defaults, pb.measures, pb.data, paper);
  CHECK(a == b);
}

TEST_CASE("interface weight modes differ on the flower") {
  const BenchmarkProblem pb = flower_problem();
  SamplingPlan plan{64, 64, 8, 0};
  const SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 4, 0);
  const PiecewiseEvaluator ev = evaluator_from_exact(pb);
  LossModes corrected, paper;
  paper.paper_interface_weights = true;
  const double a = discrete_loss(ev, batch, pb.config_defaults, pb.measures, pb.data,
                                 corrected);
  const double b =
      discrete_loss(ev, batch, pb.config_defaults, pb.measures, pb.data, paper);
  CHECK(a != b);
}

TEST_CASE("q-term variants coincide iff q vanishes") {
  SamplingPlan plan{64, 32, 8, 0};
  LossModes value_mode, flux_mode;
  flux_mode.q_variant = QTermVariant::FluxDualAverage;

  const BenchmarkProblem circle = circle_problem(1.0, 1000.0);
  const SampleBatch cb = make_sample_batch(circle.domain_spec(), plan, 6, 0);
  const PiecewiseEvaluator cev = evaluator_from_exact(circle);
  CHECK(discrete_loss(cev, cb, circle.config_defaults, circle.measures, circle.data,
                      value_mode) ==
        discrete_loss(cev, cb, circle.config_defaults, circle.measures, circle.data,
                      flux_mode));

  const BenchmarkProblem fl = flower_problem();
  const SampleBatch fb = make_sample_batch(fl.domain_spec(), plan, 6, 0);
  const PiecewiseEvaluator fev = evaluator_from_exact(fl);
  const double lv = discrete_loss(fev, fb, fl.config_defaults, fl.measures, fl.data,
                                  value_mode);
  const double lf =
      discrete_loss(fev, fb, fl.config_defaults, fl.measures, fl.data, flux_mode);
  CHECK(lv != lf);
}

TEST_CASE("directional derivative: zero direction and quadratic identity") {
  const BenchmarkProblem pb = circle_problem(1.0, 1000.0);
  SamplingPlan plan{256, 64, 32, 0};
  const SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 9, 0);
  const PiecewiseEvaluator u = random_bubble_direction(pb, 42);

  CHECK(directional_derivative(u, evaluator_zero(2), batch, pb.config_defaults,
                               pb.measures, pb.data, 1e-4) == 0.0);

  // L(u + eps v) - L(u) - eps D = (eps^2/2) * second difference
  const PiecewiseEvaluator v = random_bubble_direction(pb, 43);
  const double eps = 1e-3;
  const double D = directional_derivative(u, v, batch, pb.config_defaults, pb.measures,
                                          pb.data, eps);
  const double l0 = discrete_loss(u, batch, pb.config_defaults, pb.measures, pb.data);
  const double lp = discrete_loss(evaluator_axpy(u, eps, v), batch, pb.config_defaults,
                                  pb.measures, pb.data);
  const double lm = discrete_loss(evaluator_axpy(u, -eps, v), batch,
                                  pb.config_defaults, pb.measures, pb.data);
  const double lhs = lp - l0 - eps * D;
  const double rhs = 0.5 * (lp + lm - 2.0 * l0);
  CHECK(rel_err(lhs, rhs, 1e-9 * std::abs(l0)) < 1e-9);
}

TEST_CASE("exact circle solution is a stationary point of the energy") {
  const BenchmarkProblem pb = circle_problem(1.0, 1000.0);
  SamplingPlan plan{20000, 4000, 2000, 0};
  const SampleBatch batch = make_sample_batch(pb.domain_spec(), plan, 14, 0);
  const PiecewiseEvaluator u = evaluator_from_exact(pb);
  for (int k = 0; k < 3; ++k) {
    const PiecewiseEvaluator v = random_bubble_direction(pb, 300 + k);
    const DerivativeEstimate de = directional_derivative_stats(
        u, v, batch, pb.config_defaults, pb.measures, pb.data, 1e-6);
    CHECK(std::abs(de.value) <= 5.0 * de.stderr_);
  }
}
