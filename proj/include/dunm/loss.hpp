#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dunm/autodiff.hpp"
#include "dunm/geometry.hpp"
#include "dunm/network.hpp"
#include "dunm/sampling.hpp"

namespace dunm {

struct NitscheConfig {
  double beta1 = 1.0;
  double beta2 = 1.0;
  double gamma_f = 0.0;  // interface penalty
  double gamma_b = 0.0;  // boundary penalty
};

void validate(const NitscheConfig& cfg);

struct Kappa {
  double k1 = 0.5, k2 = 0.5;
};

// k1 = beta2/(beta1+beta2), k2 = beta1/(beta1+beta2); k1 + k2 = 1.
Kappa kappa(const NitscheConfig& cfg);

template <class S>
S jump(const S& w1, const S& w2) {
  return w2 - w1;
}
template <class S>
S weighted_avg(const S& w1, const S& w2, Kappa k) {
  return k.k1 * w1 + k.k2 * w2;
}
template <class S>
S dual_avg(const S& w1, const S& w2, Kappa k) {
  return k.k2 * w1 + k.k1 * w2;
}

// The flux-data term of the energy pairs q with the dual average of the
// function value; a compatibility mode pairs it with the dual average of the
// weighted normal flux instead. The two coincide whenever q vanishes.
enum class QTermVariant { ValueDualAverage, FluxDualAverage };

struct LossModes {
  // true reproduces uniform |Gamma|/N_f interface weights even on the polar
  // interface; false applies per-point arclength-corrected weights
  bool paper_interface_weights = false;
  QTermVariant q_variant = QTermVariant::ValueDualAverage;
  // weight ball-floor points and box-drawn interior points as separate strata
  bool stratified_inner = false;
};

// Closed-form data of a problem as it enters the loss.
struct ProblemData {
  std::function<double(Region, std::span<const double>)> f;
  std::function<double(std::span<const double>)> p;  // value jump on Gamma
  std::function<double(std::span<const double>)> q;  // flux jump on Gamma
  std::function<double(std::span<const double>)> g;  // Dirichlet data
  double inner_ball_volume = 0.0;  // ball stratum measure (spheres)
  double inner_ball_r0 = 0.0;
};

// Value-and-gradient map per region: a network pair during training, a
// closed-form solution when used as a verification oracle.
struct PiecewiseEvaluator {
  std::function<DualPoint(Region, std::span<const double>)> eval;
  std::function<double(Region, std::span<const double>)> value;  // fast path

  DualPoint operator()(Region r, std::span<const double> x) const { return eval(r, x); }
};

PiecewiseEvaluator evaluator_from_pair(const NetworkPair& pair);
PiecewiseEvaluator evaluator_zero(int dim);
// u + c * v
PiecewiseEvaluator evaluator_axpy(const PiecewiseEvaluator& u, double c,
                                  const PiecewiseEvaluator& v);

// Trace data of both sides at one interface point.
struct InterfaceTrace {
  double u1 = 0.0, u2 = 0.0;
  std::vector<double> g1, g2, normal;
  double p = 0.0, q = 0.0;
};

double interface_term_from_trace(const InterfaceTrace& trace, const NitscheConfig& cfg,
                                 Kappa kap, QTermVariant qv);

// ------------------------------------------------------------------
// Per-point terms of the discrete energy, written once and instantiated for
// plain doubles (evaluation) and tape scalars (training gradients).

struct PlainOps {
  using Scalar = double;
  using Grad = std::span<const double>;
  double sumsq(Grad g) const {
    double s = 0.0;
    for (double v : g) s += v * v;
    return s;
  }
  double dot(Grad g, std::span<const double> w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * w[i];
    return s;
  }
};

struct TapeOps {
  Tape* tape = nullptr;
  using Scalar = TScalar;
  using Grad = TSlice;
  TScalar sumsq(TSlice g) const { return tape->sumsq(g); }
  TScalar dot(TSlice g, std::span<const double> w) const { return tape->dot(g, w); }
};

// (beta/2) |grad u|^2 - f u
template <class Ops>
typename Ops::Scalar interior_term(const Ops& ops, typename Ops::Scalar u,
                                   typename Ops::Grad grad, double beta, double f_x) {
  return 0.5 * beta * ops.sumsq(grad) - f_x * u;
}

// (gamma_f/2)([u]-p)^2 - (gamma_f/2)p^2 + ([u]-p)<beta dn u> + q <.>*
//
// Consistency and flux-data terms enter with the signs that make the exact
// solution stationary under THIS jump orientation ([w] = w2 - w1, normal
// pointing from region 1 into region 2). Classical unfitted-Nitsche forms
// are often written for the opposite jump orientation, where the same terms
// carry minus signs; mixing the two breaks the Euler-Lagrange identity,
// which the stationarity tests would catch.
template <class Ops>
typename Ops::Scalar interface_term(const Ops& ops, typename Ops::Scalar u1,
                                    typename Ops::Grad g1, typename Ops::Scalar u2,
                                    typename Ops::Grad g2,
                                    std::span<const double> normal, double p_x,
                                    double q_x, const NitscheConfig& cfg, Kappa kap,
                                    QTermVariant qv) {
  using S = typename Ops::Scalar;
  S ju = jump(u1, u2);
  S b1dn = cfg.beta1 * ops.dot(g1, normal);
  S b2dn = cfg.beta2 * ops.dot(g2, normal);
  S flux_avg = weighted_avg(b1dn, b2dn, kap);
  S term = 0.5 * cfg.gamma_f * square(ju - p_x) - 0.5 * cfg.gamma_f * p_x * p_x +
           (ju - p_x) * flux_avg;
  if (q_x != 0.0) {
    S dual = (qv == QTermVariant::ValueDualAverage) ? dual_avg(u1, u2, kap)
                                                    : dual_avg(b1dn, b2dn, kap);
    term = term + q_x * dual;
  }
  return term;
}

// gamma_b (u2 - g)^2
template <class Ops>
typename Ops::Scalar boundary_term(const Ops&, typename Ops::Scalar u2, double g_x,
                                   double gamma_b) {
  return gamma_b * square(u2 - g_x);
}

// ------------------------------------------------------------------

// Per-point quadrature weights of one batch (sum w_k h(x_k) estimates the
// corresponding integral).
struct BatchWeights {
  std::vector<double> inner;
  double outer = 0.0;
  std::vector<double> interface_w;
  double boundary = 0.0;
};

BatchWeights compute_batch_weights(const SampleBatch& batch,
                                   const GeometryMeasures& measures,
                                   const ProblemData& data, const LossModes& modes);

// The discrete extended energy on one batch.
double discrete_loss(const PiecewiseEvaluator& evaluator, const SampleBatch& batch,
                     const NitscheConfig& cfg, const GeometryMeasures& measures,
                     const ProblemData& data, const LossModes& modes = {});

// Loss value and exact joint gradient (inner params then outer params).
std::pair<double, GradientVector> discrete_loss_gradient(
    const NetworkPair& pair, const SampleBatch& batch, const NitscheConfig& cfg,
    const GeometryMeasures& measures, const ProblemData& data,
    const LossModes& modes = {});

// (L(u + eps v) - L(u - eps v)) / (2 eps) on a fixed batch: the discrete
// Gateaux derivative. stats variant also returns the Monte-Carlo standard
// error of the estimate.
struct DerivativeEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

DerivativeEstimate directional_derivative_stats(
    const PiecewiseEvaluator& u, const PiecewiseEvaluator& v, const SampleBatch& batch,
    const NitscheConfig& cfg, const GeometryMeasures& measures, const ProblemData& data,
    double eps, const LossModes& modes = {});

double directional_derivative(const PiecewiseEvaluator& u, const PiecewiseEvaluator& v,
                              const SampleBatch& batch, const NitscheConfig& cfg,
                              const GeometryMeasures& measures, const ProblemData& data,
                              double eps, const LossModes& modes = {});

}  // namespace dunm
