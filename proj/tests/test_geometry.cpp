#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "dunm/geometry.hpp"
#include "dunm/random.hpp"

using namespace dunm;

namespace {
constexpr double kPi = 3.14159265358979323846;

// independent composite-Simpson oracle for the perimeter quadrature
double simpson_perimeter(int n) {
  auto f = [](double t) {
    const double r = flower_radius(t);
    const double rp = flower_radius_deriv(t);
    return std::sqrt(r * r + rp * rp);
  };
  const double h = 2.0 * kPi / n;
  double acc = f(0.0) + f(2.0 * kPi);
  for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}
}  // namespace

TEST_CASE("classify: circle and flower membership") {
  const LevelSetInterface circle = make_sphere_levelset(2, 0.5, symmetric_box(2, 1.0));
  const double origin[2] = {0.0, 0.0};
  const double corner[2] = {0.9, 0.9};
  CHECK(classify(circle, origin) == Region::Inside);
  CHECK(classify(circle, corner) == Region::Outside);

  const LevelSetInterface flower = make_flower_levelset();
  // along theta = pi/2 the petal reaches 1/2 + 1/7 > 0.6
  const double petal[2] = {0.0, 0.6};
  CHECK(flower_radius(kPi / 2) == doctest::Approx(0.5 + 1.0 / 7.0).epsilon(1e-15));
  CHECK(classify(flower, petal) == Region::Inside);

  const double outside_box[2] = {1.5, 0.0};
  CHECK_THROWS_AS(classify(circle, outside_box), std::invalid_argument);
}

TEST_CASE("classify assigns the zero set to Outside") {
  const LevelSetInterface circle = make_sphere_levelset(2, 0.5, symmetric_box(2, 1.0));
  const double on_gamma[2] = {0.5, 0.0};
  CHECK(circle.phi(on_gamma) == 0.0);
  CHECK(classify(circle, on_gamma) == Region::Outside);
}

TEST_CASE("unit_normal on circle, sphere and flower") {
  const LevelSetInterface circle = make_sphere_levelset(2, 0.5, symmetric_box(2, 1.0));
  const double xr[2] = {0.5, 0.0};
  const auto n2 = unit_normal(circle, xr);
  CHECK(n2[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(n2[1] == doctest::Approx(0.0).epsilon(1e-14));

  const LevelSetInterface sphere = make_sphere_levelset(3, 0.4, symmetric_box(3, 0.5));
  const double xz[3] = {0.0, 0.0, 0.4};
  const auto n3 = unit_normal(sphere, xz);
  CHECK(n3[2] == doctest::Approx(1.0).epsilon(1e-14));

  // flower at theta = 0: r'(0) = 5/7 > 0 tilts the normal clockwise
  const LevelSetInterface flower = make_flower_levelset();
  const double xf[2] = {0.5, 0.0};
  const auto nf = unit_normal(flower, xf);
  CHECK(nf[0] > 0.0);
  CHECK(nf[1] < 0.0);

  // compare against a finite-difference gradient of phi
  const double h = 1e-7;
  double gfd[2];
  for (int j = 0; j < 2; ++j) {
    double xp[2] = {xf[0], xf[1]}, xm[2] = {xf[0], xf[1]};
    xp[j] += h;
    xm[j] -= h;
    gfd[j] = (flower.phi(xp) - flower.phi(xm)) / (2 * h);
  }
  const double norm = std::hypot(gfd[0], gfd[1]);
  CHECK(nf[0] == doctest::Approx(gfd[0] / norm).epsilon(1e-6));
  CHECK(nf[1] == doctest::Approx(gfd[1] / norm).epsilon(1e-6));
}

TEST_CASE("unit_normal preconditions and degeneracy") {
  const LevelSetInterface circle = make_sphere_levelset(2, 0.5, symmetric_box(2, 1.0));
  const double off[2] = {0.7, 0.0};
  CHECK_THROWS_AS(unit_normal(circle, off), std::invalid_argument);

  LevelSetInterface flat;
  flat.box = symmetric_box(2, 1.0);
  flat.phi = [](std::span<const double>) { return 0.0; };
  flat.grad_phi = [](std::span<const double>) { return std::vector<double>{0.0, 0.0}; };
  const double x[2] = {0.1, 0.1};
  CHECK_THROWS_AS(unit_normal(flat, x), std::runtime_error);
}

TEST_CASE("unit_normal has unit length at random interface points") {
  const LevelSetInterface flower = make_flower_levelset();
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double theta = rng.uniform(0.0, 2 * kPi);
    const double r = flower_radius(theta);
    const double x[2] = {r * std::cos(theta), r * std::sin(theta)};
    const auto n = unit_normal(flower, x);
    CHECK(std::abs(std::hypot(n[0], n[1]) - 1.0) < 1e-12);
  }
}

TEST_CASE("classify is consistent with the level-set sign") {
  const LevelSetInterface flower = make_flower_levelset();
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double x[2] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double phi = flower.phi(x);
    if (std::abs(phi) <= 1e-9) continue;
    CHECK(classify(flower, x) == (phi < 0 ? Region::Inside : Region::Outside));
  }
}

TEST_CASE("analytic measures") {
  const GeometryMeasures s3 = analytic_measures_sphere(3, 0.4);
  CHECK(s3.omega1 == doctest::Approx(4.0 / 3.0 * kPi * 0.064).epsilon(1e-12));
  CHECK(s3.omega1 + s3.omega2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s3.boundary == 6.0);
  CHECK(s3.gamma == doctest::Approx(4.0 * kPi * 0.16).epsilon(1e-12));

  const GeometryMeasures fl = analytic_measures_flower();
  CHECK(fl.omega1 == 51.0 * kPi / 196.0);
  CHECK(fl.omega1 + fl.omega2 == 4.0);
  CHECK(fl.boundary == 8.0);

  const GeometryMeasures c = analytic_measures_circle(0.5);
  CHECK(c.omega1 == doctest::Approx(kPi / 4.0).epsilon(1e-15));
  CHECK(c.boundary == 8.0);
}

TEST_CASE("flower perimeter quadrature agrees with a Simpson oracle") {
  const double p = flower_perimeter();
  CHECK(p == doctest::Approx(simpson_perimeter(20000)).epsilon(1e-10));
  // the perimeter exceeds the circumference of the mean circle
  CHECK(p > 2 * kPi * 0.5);
}

TEST_CASE("hit-or-miss: the whole box is exact") {
  const Box box = symmetric_box(3, 0.5);
  const MeasureEstimate est = hit_or_miss_measure(
      box, [](std::span<const double>) { return true; }, 1000, 1);
  CHECK(est.estimate == box.volume());
  CHECK(est.stderr_ == 0.0);
}

TEST_CASE("hit-or-miss: circle and flower areas within 3 sigma") {
  const LevelSetInterface circle = make_sphere_levelset(2, 0.5, symmetric_box(2, 1.0));
  const MeasureEstimate c = hit_or_miss_measure(circle, Region::Inside, 1000000, 11);
  CHECK(std::abs(c.estimate - kPi / 4.0) <= 3.0 * c.stderr_);

  const LevelSetInterface flower = make_flower_levelset();
  const MeasureEstimate f = hit_or_miss_measure(flower, Region::Inside, 1000000, 12);
  CHECK(std::abs(f.estimate - 51.0 * kPi / 196.0) <= 3.0 * f.stderr_);
}

TEST_CASE("hit-or-miss standard error shrinks like 1/sqrt(N)") {
  const LevelSetInterface circle = make_sphere_levelset(2, 0.5, symmetric_box(2, 1.0));
  double se_n = 0.0, se_2n = 0.0;
  const int repeats = 100;
  for (int r = 0; r < repeats; ++r) {
    se_n += hit_or_miss_measure(circle, Region::Inside, 2000, 100 + r).stderr_;
    se_2n += hit_or_miss_measure(circle, Region::Inside, 4000, 500 + r).stderr_;
  }
  const double ratio = se_n / se_2n;
  CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("box geometry helpers") {
  const Box b = symmetric_box(3, 0.5);
  CHECK(b.volume() == 1.0);
  CHECK(b.surface_area() == 6.0);
  CHECK(b.is_cube());
  Box rect{{0.0, 0.0}, {2.0, 1.0}};
  CHECK(!rect.is_cube());
  CHECK(rect.volume() == 2.0);
  CHECK(rect.surface_area() == 6.0);
}
