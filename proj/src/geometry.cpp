#include "dunm/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "dunm/random.hpp"

namespace dunm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

double Box::surface_area() const {
  double total = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    double face = 1.0;
    for (std::size_t j = 0; j < lo.size(); ++j)
      if (j != i) face *= hi[j] - lo[j];
    total += 2.0 * face;
  }
  return total;
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

bool Box::is_cube() const {
  const double s = hi[0] - lo[0];
  for (std::size_t i = 1; i < lo.size(); ++i)
    if (hi[i] - lo[i] != s) return false;
  return true;
}

Box symmetric_box(int d, double half_width) {
  Box b;
  b.lo.assign(d, -half_width);
  b.hi.assign(d, half_width);
  return b;
}

Region classify(const LevelSetInterface& geom, std::span<const double> x) {
  if (!geom.box.contains(x))
    throw std::invalid_argument("classify: point outside the domain box");
  return geom.phi(x) < 0.0 ? Region::Inside : Region::Outside;
}

std::vector<double> unit_normal(const LevelSetInterface& geom,
                                std::span<const double> x, double tol_gamma) {
  if (std::abs(geom.phi(x)) > tol_gamma)
    throw std::invalid_argument("unit_normal: point is not on the interface");
  std::vector<double> g = geom.grad_phi(x);
  double norm = 0.0;
  for (double v : g) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-12)
    throw std::runtime_error("unit_normal: degenerate level set gradient");
  for (double& v : g) v /= norm;
  return g;
}

double ball_volume(int d, double r) {
  return std::pow(kPi, d / 2.0) * std::pow(r, d) / std::tgamma(d / 2.0 + 1.0);
}

double sphere_area(int d, double r) {
  return 2.0 * std::pow(kPi, d / 2.0) * std::pow(r, d - 1) / std::tgamma(d / 2.0);
}

double flower_radius(double theta) { return 0.5 + std::sin(5.0 * theta) / 7.0; }

double flower_radius_deriv(double theta) { return (5.0 / 7.0) * std::cos(5.0 * theta); }

double flower_area() {
  // (1/2) integral of r(theta)^2 over one period
  return 51.0 * kPi / 196.0;
}

double flower_perimeter() {
  // smooth periodic integrand: the trapezoid rule converges spectrally
  const int n = 1 << 16;
  const double h = 2.0 * kPi / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    const double r = flower_radius(t);
    const double rp = flower_radius_deriv(t);
    acc += std::sqrt(r * r + rp * rp);
  }
  return acc * h;
}

LevelSetInterface make_sphere_levelset(int d, double r0, Box box) {
  if (box.dim() != d)
    throw std::invalid_argument("make_sphere_levelset: box dimension mismatch");
  LevelSetInterface g;
  g.box = std::move(box);
  g.phi = [r0](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s) - r0;
  };
  g.grad_phi = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    const double r = std::sqrt(s);
    std::vector<double> grad(x.size(), 0.0);
    if (r > 1e-12)
      for (std::size_t i = 0; i < x.size(); ++i) grad[i] = x[i] / r;
    return grad;
  };
  return g;
}

LevelSetInterface make_flower_levelset() {
  LevelSetInterface g;
  g.box = symmetric_box(2, 1.0);
  g.phi = [](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    const double theta = std::atan2(x[1], x[0]);
    return r - flower_radius(theta);
  };
  g.grad_phi = [](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    std::vector<double> grad(2, 0.0);
    if (r < 1e-12) return grad;  // never queried near the origin on Gamma
    const double theta = std::atan2(x[1], x[0]);
    const double rp = flower_radius_deriv(theta);
    // grad(r) = x/r, grad(theta) = (-x2, x1)/r^2
    grad[0] = x[0] / r - rp * (-x[1] / (r * r));
    grad[1] = x[1] / r - rp * (x[0] / (r * r));
    return grad;
  };
  return g;
}

GeometryMeasures analytic_measures_flower() {
  GeometryMeasures m;
  m.omega1 = flower_area();
  m.omega2 = 4.0 - m.omega1;
  m.gamma = flower_perimeter();
  m.boundary = 8.0;
  return m;
}

GeometryMeasures analytic_measures_circle(double r0) {
  GeometryMeasures m;
  m.omega1 = kPi * r0 * r0;
  m.omega2 = 4.0 - m.omega1;
  m.gamma = 2.0 * kPi * r0;
  m.boundary = 8.0;
  return m;
}

GeometryMeasures analytic_measures_sphere(int d, double r0) {
  GeometryMeasures m;
  m.omega1 = ball_volume(d, r0);
  m.omega2 = 1.0 - m.omega1;
  m.gamma = sphere_area(d, r0);
  m.boundary = 2.0 * d;
  return m;
}

MeasureEstimate hit_or_miss_measure(
    const Box& box, const std::function<bool(std::span<const double>)>& inside,
    std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("hit_or_miss_measure: n >= 1 required");
  Rng rng(seed, RngStream::HitOrMiss);
  const int d = box.dim();
  std::vector<double> x(d);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x[j] = rng.uniform(box.lo[j], box.hi[j]);
    if (inside(x)) ++hits;
  }
  const double vol = box.volume();
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  MeasureEstimate est;
  est.estimate = vol * p;
  est.stderr_ = vol * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return est;
}

MeasureEstimate hit_or_miss_measure(const LevelSetInterface& geom, Region region,
                                    std::int64_t n, std::uint64_t seed) {
  return hit_or_miss_measure(
      geom.box,
      [&](std::span<const double> x) { return classify(geom, x) == region; }, n,
      seed);
}

}  // namespace dunm
