#include "dunm/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace dunm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void validate(const NitscheConfig& cfg) {
  if (!(cfg.beta1 > 0.0) || !(cfg.beta2 > 0.0))
    throw std::invalid_argument("nitsche config: min(beta1, beta2) > 0 required");
  if (cfg.gamma_f < 0.0 || cfg.gamma_b < 0.0)
    throw std::invalid_argument("nitsche config: penalties must be >= 0");
}

Kappa kappa(const NitscheConfig& cfg) {
  validate(cfg);
  // k2 as the exact complement keeps k1 + k2 == 1 in floating point
  const double k1 = cfg.beta2 / (cfg.beta1 + cfg.beta2);
  return Kappa{k1, 1.0 - k1};
}

PiecewiseEvaluator evaluator_from_pair(const NetworkPair& pair) {
  PiecewiseEvaluator ev;
  ev.eval = [pair](Region r, std::span<const double> x) {
    const Network& net = (r == Region::Inside) ? pair.inner : pair.outer;
    return value_and_spatial_gradient(net.arch, net.params, x);
  };
  ev.value = [pair](Region r, std::span<const double> x) {
    const Network& net = (r == Region::Inside) ? pair.inner : pair.outer;
    std::vector<double> scratch;
    return forward_value(net.arch, net.params, x, scratch);
  };
  return ev;
}

PiecewiseEvaluator evaluator_zero(int dim) {
  PiecewiseEvaluator ev;
  ev.eval = [dim](Region, std::span<const double>) {
    return DualPoint{0.0, std::vector<double>(dim, 0.0)};
  };
  ev.value = [](Region, std::span<const double>) { return 0.0; };
  return ev;
}

PiecewiseEvaluator evaluator_axpy(const PiecewiseEvaluator& u, double c,
                                  const PiecewiseEvaluator& v) {
  PiecewiseEvaluator ev;
  ev.eval = [u, c, v](Region r, std::span<const double> x) {
    DualPoint a = u.eval(r, x);
    const DualPoint b = v.eval(r, x);
    a.value += c * b.value;
    for (std::size_t i = 0; i < a.tangent.size(); ++i) a.tangent[i] += c * b.tangent[i];
    return a;
  };
  const auto uv = u.value, vv = v.value;
  ev.value = [uv, c, vv](Region r, std::span<const double> x) {
    return uv(r, x) + c * vv(r, x);
  };
  return ev;
}

BatchWeights compute_batch_weights(const SampleBatch& batch,
                                   const GeometryMeasures& measures,
                                   const ProblemData& data, const LossModes& modes) {
  BatchWeights w;
  const std::size_t n1 = batch.n1(), n2 = batch.n2(), nf = batch.nf(), nb = batch.nb();
  if (n1 == 0 || n2 == 0 || nf == 0 || nb == 0)
    throw std::invalid_argument("loss: every point class must be nonempty");

  w.inner.assign(n1, measures.omega1 / static_cast<double>(n1));
  if (modes.stratified_inner && data.inner_ball_volume > 0.0) {
    // stratify the inside region into the sampled ball and its complement
    const double r0 = data.inner_ball_r0;
    std::size_t n_ball = 0;
    for (std::size_t i = 0; i < n1; ++i) {
      auto x = batch.inner[i];
      double s = 0.0;
      for (double v : x) s += v * v;
      if (std::sqrt(s) <= r0) ++n_ball;
    }
    const std::size_t n_shell = n1 - n_ball;
    const double w_ball = n_ball ? data.inner_ball_volume / n_ball : 0.0;
    const double shell_vol = measures.omega1 - data.inner_ball_volume;
    const double w_shell = n_shell ? shell_vol / n_shell : 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      auto x = batch.inner[i];
      double s = 0.0;
      for (double v : x) s += v * v;
      w.inner[i] = (std::sqrt(s) <= r0) ? w_ball : w_shell;
    }
  }

  w.outer = measures.omega2 / static_cast<double>(n2);

  w.interface_w.assign(nf, measures.gamma / static_cast<double>(nf));
  if (!modes.paper_interface_weights && !batch.interface_arclength.empty()) {
    // theta-uniform points: ds = sqrt(r^2 + r'^2) dtheta
    const double h = 2.0 * kPi / static_cast<double>(nf);
    for (std::size_t i = 0; i < nf; ++i)
      w.interface_w[i] = h * batch.interface_arclength[i];
  }

  w.boundary = measures.boundary / static_cast<double>(nb);
  return w;
}

double interface_term_from_trace(const InterfaceTrace& trace, const NitscheConfig& cfg,
                                 Kappa kap, QTermVariant qv) {
  return interface_term(PlainOps{}, trace.u1, std::span<const double>(trace.g1),
                        trace.u2, std::span<const double>(trace.g2),
                        std::span<const double>(trace.normal), trace.p, trace.q, cfg,
                        kap, qv);
}

namespace {

double interior_term_at(const PiecewiseEvaluator& ev, Region r,
                        std::span<const double> x, double beta, double f_x) {
  const DualPoint u = ev.eval(r, x);
  return interior_term(PlainOps{}, u.value, std::span<const double>(u.tangent), beta,
                       f_x);
}

double interface_term_at(const PiecewiseEvaluator& ev, std::span<const double> x,
                         std::span<const double> normal, double p_x, double q_x,
                         const NitscheConfig& cfg, Kappa kap, QTermVariant qv) {
  InterfaceTrace trace;
  DualPoint a = ev.eval(Region::Inside, x);
  DualPoint b = ev.eval(Region::Outside, x);
  trace.u1 = a.value;
  trace.u2 = b.value;
  trace.g1 = std::move(a.tangent);
  trace.g2 = std::move(b.tangent);
  trace.normal.assign(normal.begin(), normal.end());
  trace.p = p_x;
  trace.q = q_x;
  return interface_term_from_trace(trace, cfg, kap, qv);
}

double boundary_term_at(const PiecewiseEvaluator& ev, std::span<const double> x,
                        double g_x, double gamma_b) {
  const double u2 = ev.value ? ev.value(Region::Outside, x)
                             : ev.eval(Region::Outside, x).value;
  return boundary_term(PlainOps{}, u2, g_x, gamma_b);
}

}  // namespace

double discrete_loss(const PiecewiseEvaluator& evaluator, const SampleBatch& batch,
                     const NitscheConfig& cfg, const GeometryMeasures& measures,
                     const ProblemData& data, const LossModes& modes) {
  validate(cfg);
  const BatchWeights w = compute_batch_weights(batch, measures, data, modes);
  const Kappa kap = kappa(cfg);

  double total = 0.0;
  for (std::size_t i = 0; i < batch.n1(); ++i) {
    auto x = batch.inner[i];
    total += w.inner[i] *
             interior_term_at(evaluator, Region::Inside, x, cfg.beta1,
                              data.f(Region::Inside, x));
  }
  for (std::size_t i = 0; i < batch.n2(); ++i) {
    auto x = batch.outer[i];
    total += w.outer * interior_term_at(evaluator, Region::Outside, x, cfg.beta2,
                                        data.f(Region::Outside, x));
  }
  for (std::size_t i = 0; i < batch.nf(); ++i) {
    auto x = batch.interface_pts[i];
    total += w.interface_w[i] *
             interface_term_at(evaluator, x, batch.normal(i), data.p(x), data.q(x),
                               cfg, kap, modes.q_variant);
  }
  for (std::size_t i = 0; i < batch.nb(); ++i) {
    auto x = batch.boundary[i];
    total += w.boundary * boundary_term_at(evaluator, x, data.g(x), cfg.gamma_b);
  }
  if (!std::isfinite(total))
    throw std::runtime_error("discrete_loss: non-finite value");
  return total;
}

namespace {

// The full batch loss as an ordered term sequence over a joint parameter
// block [inner | outer].
class NitscheTermLoss final : public TermLoss {
 public:
  NitscheTermLoss(const NetworkPair& pair, const SampleBatch& batch,
                  const NitscheConfig& cfg, const GeometryMeasures& measures,
                  const ProblemData& data, const LossModes& modes)
      : batch_(batch),
        cfg_(cfg),
        data_(data),
        modes_(modes),
        weights_(compute_batch_weights(batch, measures, data, modes)),
        kappa_(kappa(cfg)) {
    inner_ = TapeNetwork{pair.inner.arch, 0};
    outer_ = TapeNetwork{pair.outer.arch,
                         static_cast<std::int32_t>(pair.inner.params.size())};
    n1_ = batch.n1();
    n2_ = batch.n2();
    nf_ = batch.nf();
  }

  std::size_t term_count() const override { return n1_ + n2_ + nf_ + batch_.nb(); }

  double term_weight(std::size_t k) const override {
    if (k < n1_) return weights_.inner[k];
    k -= n1_;
    if (k < n2_) return weights_.outer;
    k -= n2_;
    if (k < nf_) return weights_.interface_w[k];
    return weights_.boundary;
  }

  TScalar record_term(Tape& tape, std::size_t k) const override {
    TapeOps ops{&tape};
    if (k < n1_) {
      auto x = batch_.inner[k];
      const TapeDual u = record_dual(tape, inner_, x);
      return interior_term(ops, u.value, u.gradient, cfg_.beta1,
                           data_.f(Region::Inside, x));
    }
    k -= n1_;
    if (k < n2_) {
      auto x = batch_.outer[k];
      const TapeDual u = record_dual(tape, outer_, x);
      return interior_term(ops, u.value, u.gradient, cfg_.beta2,
                           data_.f(Region::Outside, x));
    }
    k -= n2_;
    if (k < nf_) {
      auto x = batch_.interface_pts[k];
      const TapeDual a = record_dual(tape, inner_, x);
      const TapeDual b = record_dual(tape, outer_, x);
      return interface_term(ops, a.value, a.gradient, b.value, b.gradient,
                            batch_.normal(k), data_.p(x), data_.q(x), cfg_, kappa_,
                            modes_.q_variant);
    }
    k -= nf_;
    auto x = batch_.boundary[k];
    const TScalar u2 = record_value(tape, outer_, x);
    return boundary_term(TapeOps{&tape}, u2, data_.g(x), cfg_.gamma_b);
  }

 private:
  const SampleBatch& batch_;
  NitscheConfig cfg_;
  const ProblemData& data_;
  LossModes modes_;
  BatchWeights weights_;
  Kappa kappa_;
  TapeNetwork inner_, outer_;
  std::size_t n1_ = 0, n2_ = 0, nf_ = 0;
};

}  // namespace

std::pair<double, GradientVector> discrete_loss_gradient(
    const NetworkPair& pair, const SampleBatch& batch, const NitscheConfig& cfg,
    const GeometryMeasures& measures, const ProblemData& data,
    const LossModes& modes) {
  validate(cfg);
  NitscheTermLoss loss(pair, batch, cfg, measures, data, modes);
  std::vector<double> joint;
  joint.reserve(pair.inner.params.size() + pair.outer.params.size());
  joint.insert(joint.end(), pair.inner.params.begin(), pair.inner.params.end());
  joint.insert(joint.end(), pair.outer.params.begin(), pair.outer.params.end());
  return loss_gradient(loss, joint);
}

DerivativeEstimate directional_derivative_stats(
    const PiecewiseEvaluator& u, const PiecewiseEvaluator& v, const SampleBatch& batch,
    const NitscheConfig& cfg, const GeometryMeasures& measures, const ProblemData& data,
    double eps, const LossModes& modes) {
  if (!(eps > 0.0)) throw std::invalid_argument("directional derivative: eps > 0");
  validate(cfg);
  const BatchWeights w = compute_batch_weights(batch, measures, data, modes);
  const Kappa kap = kappa(cfg);
  const PiecewiseEvaluator up = evaluator_axpy(u, eps, v);
  const PiecewiseEvaluator um = evaluator_axpy(u, -eps, v);

  double total = 0.0;
  double var_total = 0.0;

  // accumulates one class of i.i.d. contributions s_k = n * w_k * y_k,
  // estimate mean(s), variance of the mean
  struct ClassAcc {
    double sum = 0.0, sumsq = 0.0;
    std::size_t n = 0;
    void add(double s) {
      sum += s;
      sumsq += s * s;
      ++n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double var_of_mean() const {
      if (n < 2) return 0.0;
      const double m = mean();
      const double var = (sumsq - static_cast<double>(n) * m * m) /
                         (static_cast<double>(n) - 1.0);
      return var / static_cast<double>(n);
    }
  };

  auto flush = [&](const ClassAcc& acc) {
    total += acc.mean();
    var_total += acc.var_of_mean();
  };

  ClassAcc acc;
  const double inv2e = 1.0 / (2.0 * eps);
  for (std::size_t i = 0; i < batch.n1(); ++i) {
    auto x = batch.inner[i];
    const double f_x = data.f(Region::Inside, x);
    const double y = (interior_term_at(up, Region::Inside, x, cfg.beta1, f_x) -
                      interior_term_at(um, Region::Inside, x, cfg.beta1, f_x)) *
                     inv2e;
    acc.add(static_cast<double>(batch.n1()) * w.inner[i] * y);
  }
  flush(acc);

  acc = ClassAcc{};
  for (std::size_t i = 0; i < batch.n2(); ++i) {
    auto x = batch.outer[i];
    const double f_x = data.f(Region::Outside, x);
    const double y = (interior_term_at(up, Region::Outside, x, cfg.beta2, f_x) -
                      interior_term_at(um, Region::Outside, x, cfg.beta2, f_x)) *
                     inv2e;
    acc.add(static_cast<double>(batch.n2()) * w.outer * y);
  }
  flush(acc);

  acc = ClassAcc{};
  for (std::size_t i = 0; i < batch.nf(); ++i) {
    auto x = batch.interface_pts[i];
    const double p_x = data.p(x), q_x = data.q(x);
    const double y =
        (interface_term_at(up, x, batch.normal(i), p_x, q_x, cfg, kap, modes.q_variant) -
         interface_term_at(um, x, batch.normal(i), p_x, q_x, cfg, kap,
                           modes.q_variant)) *
        inv2e;
    acc.add(static_cast<double>(batch.nf()) * w.interface_w[i] * y);
  }
  flush(acc);

  acc = ClassAcc{};
  for (std::size_t i = 0; i < batch.nb(); ++i) {
    auto x = batch.boundary[i];
    const double g_x = data.g(x);
    const double y = (boundary_term_at(up, x, g_x, cfg.gamma_b) -
                      boundary_term_at(um, x, g_x, cfg.gamma_b)) *
                     inv2e;
    acc.add(static_cast<double>(batch.nb()) * w.boundary * y);
  }
  flush(acc);

  if (!std::isfinite(total))
    throw std::runtime_error("directional derivative: non-finite value");
  return DerivativeEstimate{total, std::sqrt(var_total)};
}

double directional_derivative(const PiecewiseEvaluator& u, const PiecewiseEvaluator& v,
                              const SampleBatch& batch, const NitscheConfig& cfg,
                              const GeometryMeasures& measures, const ProblemData& data,
                              double eps, const LossModes& modes) {
  return directional_derivative_stats(u, v, batch, cfg, measures, data, eps, modes)
      .value;
}

}  // namespace dunm
