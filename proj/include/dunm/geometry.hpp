#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dunm {

// Region Inside is where the level set is negative.
enum class Region { Inside, Outside };

struct Box {
  std::vector<double> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  double surface_area() const;  // (d-1)-measure of the box boundary
  bool contains(std::span<const double> x) const;
  bool is_cube() const;
  double side() const { return hi[0] - lo[0]; }
};

Box symmetric_box(int d, double half_width);

struct LevelSetInterface {
  std::function<double(std::span<const double>)> phi;
  std::function<std::vector<double>(std::span<const double>)> grad_phi;
  Box box;
};

// Inside iff phi(x) < 0; the zero set itself counts as Outside.
Region classify(const LevelSetInterface& geom, std::span<const double> x);

// grad phi / |grad phi| at a point on the interface (|phi| <= tol). Points
// from the inside region to the outside one.
std::vector<double> unit_normal(const LevelSetInterface& geom,
                                std::span<const double> x,
                                double tol_gamma = 1e-9);

struct GeometryMeasures {
  double omega1 = 0.0;   // |Omega_1|
  double omega2 = 0.0;   // |Omega_2|
  double gamma = 0.0;    // |Gamma|
  double boundary = 0.0; // |dOmega|
};

double ball_volume(int d, double r);
double sphere_area(int d, double r);  // (d-1)-measure of the sphere in R^d

// polar interface r(theta) = 1/2 + sin(5 theta)/7
double flower_radius(double theta);
double flower_radius_deriv(double theta);
double flower_area();       // closed form 51 pi / 196
double flower_perimeter();  // trapezoid quadrature of sqrt(r^2 + r'^2)

LevelSetInterface make_sphere_levelset(int d, double r0, Box box);
LevelSetInterface make_flower_levelset();  // box [-1,1]^2

GeometryMeasures analytic_measures_flower();
GeometryMeasures analytic_measures_circle(double r0);          // box [-1,1]^2
GeometryMeasures analytic_measures_sphere(int d, double r0);   // box [-1/2,1/2]^d

struct MeasureEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// |box| * hits/N with the binomial standard error.
MeasureEstimate hit_or_miss_measure(const LevelSetInterface& geom, Region region,
                                    std::int64_t n, std::uint64_t seed);
MeasureEstimate hit_or_miss_measure(
    const Box& box, const std::function<bool(std::span<const double>)>& inside,
    std::int64_t n, std::uint64_t seed);

}  // namespace dunm
