#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dunm/geometry.hpp"

namespace dunm {

// Flat, fixed-stride point storage.
struct PointSet {
  int dim = 0;
  std::vector<double> coords;  // size() * dim

  std::size_t size() const {
    return dim ? coords.size() / static_cast<std::size_t>(dim) : 0;
  }
  std::span<const double> operator[](std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  void push(std::span<const double> x) {
    coords.insert(coords.end(), x.begin(), x.end());
  }
};

struct SamplingPlan {
  std::int64_t domain_total = 1024;
  std::int64_t n_interface = 256;
  std::int64_t n_boundary = 128;
  std::int64_t min_inner = 0;  // inside-region floor for thin high-dim regions
};

// The four Monte-Carlo point classes of one training batch. Interface points
// carry unit normals and, for the polar interface, the arclength factor
// sqrt(r^2 + r'^2) at their parameter angle.
struct SampleBatch {
  PointSet inner, outer, interface_pts, boundary;
  std::vector<double> interface_normals;    // n_f * dim
  std::vector<double> interface_arclength;  // n_f (polar interface only)
  std::size_t inner_from_ball = 0;
  std::uint64_t seed = 0;
  std::int64_t epoch = 0;

  int dim() const { return inner.dim; }
  std::size_t n1() const { return inner.size(); }
  std::size_t n2() const { return outer.size(); }
  std::size_t nf() const { return interface_pts.size(); }
  std::size_t nb() const { return boundary.size(); }
  std::span<const double> normal(std::size_t i) const {
    return {interface_normals.data() + i * static_cast<std::size_t>(dim()),
            static_cast<std::size_t>(dim())};
  }
};

enum class InterfaceKind { FlowerPolar, Sphere };

// What the batch builder needs to know about a benchmark's geometry.
struct DomainSpec {
  const LevelSetInterface* geom = nullptr;
  InterfaceKind kind = InterfaceKind::Sphere;
  double r0 = 0.0;  // sphere interface radius
};

// Uniform box points partitioned by the level-set sign, in draw order.
std::pair<PointSet, PointSet> sample_domain_split(const LevelSetInterface& geom,
                                                  std::int64_t total,
                                                  std::uint64_t seed,
                                                  std::int64_t epoch = 0);

struct FlowerInterfaceSample {
  PointSet points;
  std::vector<double> normals;
  std::vector<double> arclength_weight;  // sqrt(r^2 + r'^2) per point
};
// theta uniform on (0, 2 pi) mapped onto the polar interface.
FlowerInterfaceSample sample_flower_interface(std::int64_t n, std::uint64_t seed,
                                              std::int64_t epoch = 0);

struct SphereSurfaceSample {
  PointSet points;
  std::vector<double> normals;
};
// Normalized standard-normal vectors; uniform on the sphere of radius r0.
SphereSurfaceSample sample_sphere_surface(int d, double r0, std::int64_t n,
                                          std::uint64_t seed, std::int64_t epoch = 0);

// Uniform points in the d-ball: sample the (d+2)-sphere surface and drop the
// last two coordinates.
PointSet sample_ball_dropped_coords(int d, double r0, std::int64_t n,
                                    std::uint64_t seed, std::int64_t epoch = 0);

// Face chosen uniformly among the 2d faces of a cubic box, then uniform on it.
PointSet sample_cube_boundary(int d, const Box& box, std::int64_t n,
                              std::uint64_t seed, std::int64_t epoch = 0);

// Assembles one batch: interior split (with the ball-sampled floor when
// min_inner > 0), interface points with normals, boundary points.
SampleBatch make_sample_batch(const DomainSpec& spec, const SamplingPlan& plan,
                              std::uint64_t seed, std::int64_t epoch);

}  // namespace dunm
