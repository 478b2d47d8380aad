#include "dunm/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "dunm/random.hpp"

namespace dunm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::pair<PointSet, PointSet> sample_domain_split(const LevelSetInterface& geom,
                                                  std::int64_t total,
                                                  std::uint64_t seed,
                                                  std::int64_t epoch) {
  if (total < 1) throw std::invalid_argument("sample_domain_split: total >= 1");
  Rng rng(seed, RngStream::DomainSplit, static_cast<std::uint64_t>(epoch));
  const int d = geom.box.dim();
  PointSet inner{d, {}}, outer{d, {}};
  std::vector<double> x(d);
  for (std::int64_t i = 0; i < total; ++i) {
    for (int j = 0; j < d; ++j) x[j] = rng.uniform(geom.box.lo[j], geom.box.hi[j]);
    if (geom.phi(x) < 0.0)
      inner.push(x);
    else
      outer.push(x);
  }
  return {std::move(inner), std::move(outer)};
}

FlowerInterfaceSample sample_flower_interface(std::int64_t n, std::uint64_t seed,
                                              std::int64_t epoch) {
  if (n < 1) throw std::invalid_argument("sample_flower_interface: n >= 1");
  static const LevelSetInterface geom = make_flower_levelset();
  Rng rng(seed, RngStream::Interface, static_cast<std::uint64_t>(epoch));
  FlowerInterfaceSample out;
  out.points.dim = 2;
  out.points.coords.reserve(2 * n);
  out.normals.reserve(2 * n);
  out.arclength_weight.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    const double r = flower_radius(theta);
    const double rp = flower_radius_deriv(theta);
    const double x[2] = {r * std::cos(theta), r * std::sin(theta)};
    out.points.push(x);
    const std::vector<double> nrm = unit_normal(geom, x);
    out.normals.insert(out.normals.end(), nrm.begin(), nrm.end());
    out.arclength_weight.push_back(std::sqrt(r * r + rp * rp));
  }
  return out;
}

SphereSurfaceSample sample_sphere_surface(int d, double r0, std::int64_t n,
                                          std::uint64_t seed, std::int64_t epoch) {
  if (d < 2) throw std::invalid_argument("sample_sphere_surface: d >= 2");
  if (n < 1) throw std::invalid_argument("sample_sphere_surface: n >= 1");
  Rng rng(seed, RngStream::Interface, static_cast<std::uint64_t>(epoch));
  SphereSurfaceSample out;
  out.points.dim = d;
  out.points.coords.reserve(static_cast<std::size_t>(d) * n);
  out.normals.reserve(static_cast<std::size_t>(d) * n);
  std::vector<double> z(d);
  for (std::int64_t i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int j = 0; j < d; ++j) {
        z[j] = rng.normal();
        norm += z[j] * z[j];
      }
      norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (int j = 0; j < d; ++j) {
      const double u = z[j] / norm;
      out.points.coords.push_back(r0 * u);
      out.normals.push_back(u);
    }
  }
  return out;
}

PointSet sample_ball_dropped_coords(int d, double r0, std::int64_t n,
                                    std::uint64_t seed, std::int64_t epoch) {
  if (d < 1) throw std::invalid_argument("sample_ball_dropped_coords: d >= 1");
  if (n < 1) throw std::invalid_argument("sample_ball_dropped_coords: n >= 1");
  Rng rng(seed, RngStream::BallInterior, static_cast<std::uint64_t>(epoch));
  PointSet out{d, {}};
  out.coords.reserve(static_cast<std::size_t>(d) * n);
  const int dd = d + 2;
  std::vector<double> z(dd);
  for (std::int64_t i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int j = 0; j < dd; ++j) {
        z[j] = rng.normal();
        norm += z[j] * z[j];
      }
      norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (int j = 0; j < d; ++j) out.coords.push_back(r0 * z[j] / norm);
  }
  return out;
}

PointSet sample_cube_boundary(int d, const Box& box, std::int64_t n,
                              std::uint64_t seed, std::int64_t epoch) {
  if (n < 1) throw std::invalid_argument("sample_cube_boundary: n >= 1");
  if (box.dim() != d) throw std::invalid_argument("sample_cube_boundary: box dim mismatch");
  if (!box.is_cube())
    throw std::invalid_argument("sample_cube_boundary: requires a cubic box");
  Rng rng(seed, RngStream::Boundary, static_cast<std::uint64_t>(epoch));
  PointSet out{d, {}};
  out.coords.reserve(static_cast<std::size_t>(d) * n);
  std::vector<double> x(d);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t face = rng.below(2 * static_cast<std::uint64_t>(d));
    const int axis = static_cast<int>(face / 2);
    for (int j = 0; j < d; ++j) x[j] = rng.uniform(box.lo[j], box.hi[j]);
    x[axis] = (face % 2 == 0) ? box.lo[axis] : box.hi[axis];
    out.push(x);
  }
  return out;
}

SampleBatch make_sample_batch(const DomainSpec& spec, const SamplingPlan& plan,
                              std::uint64_t seed, std::int64_t epoch) {
  if (spec.geom == nullptr) throw std::invalid_argument("make_sample_batch: no geometry");
  const LevelSetInterface& geom = *spec.geom;
  const int d = geom.box.dim();

  SampleBatch batch;
  batch.seed = seed;
  batch.epoch = epoch;
  batch.inner.dim = batch.outer.dim = d;

  if (plan.min_inner > 0) {
    if (spec.kind != InterfaceKind::Sphere)
      throw std::invalid_argument(
          "make_sample_batch: min_inner requires a spherical interface");
    PointSet floor_pts =
        sample_ball_dropped_coords(d, spec.r0, plan.min_inner, seed, epoch);
    batch.inner = std::move(floor_pts);
    batch.inner_from_ball = batch.inner.size();
  }
  const std::int64_t remaining = plan.domain_total - plan.min_inner;
  if (remaining < 0)
    throw std::invalid_argument("make_sample_batch: min_inner exceeds domain_total");
  if (remaining > 0) {
    auto [in_pts, out_pts] = sample_domain_split(geom, remaining, seed, epoch);
    batch.inner.coords.insert(batch.inner.coords.end(), in_pts.coords.begin(),
                              in_pts.coords.end());
    batch.outer = std::move(out_pts);
  }

  if (spec.kind == InterfaceKind::FlowerPolar) {
    FlowerInterfaceSample fs = sample_flower_interface(plan.n_interface, seed, epoch);
    batch.interface_pts = std::move(fs.points);
    batch.interface_normals = std::move(fs.normals);
    batch.interface_arclength = std::move(fs.arclength_weight);
  } else {
    SphereSurfaceSample ss =
        sample_sphere_surface(d, spec.r0, plan.n_interface, seed, epoch);
    batch.interface_pts = std::move(ss.points);
    batch.interface_normals = std::move(ss.normals);
  }

  batch.boundary = sample_cube_boundary(d, geom.box, plan.n_boundary, seed, epoch);
  return batch;
}

}  // namespace dunm
