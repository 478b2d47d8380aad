#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "dunm/benchmarks.hpp"
#include "dunm/sampling.hpp"
#include "dunm/training.hpp"

using namespace dunm;

TEST_CASE("flower problem: sources, jumps and defaults") {
  const BenchmarkProblem pb = flower_problem();
  CHECK(pb.config_defaults.beta1 == 1.0);
  CHECK(pb.config_defaults.beta2 == 10.0);
  CHECK(pb.config_defaults.gamma_f == 1000.0);
  CHECK(pb.config_defaults.gamma_b == 5000.0);

  const double origin[2] = {0.0, 0.0};
  CHECK(pb.data.f(Region::Inside, origin) == doctest::Approx(-4.0).epsilon(1e-15));
  const double unit[2] = {1.0, 0.0};
  CHECK(pb.data.f(Region::Outside, unit) == doctest::Approx(-16.0).epsilon(1e-15));

  // p at theta = 0 (the interface crosses (1/2, 0)):
  // u2 - u1 = (0.1/16 - 0.01 ln 1) - e^{1/4}
  const double x0[2] = {0.5, 0.0};
  const double expect_p = 0.1 * 0.0625 - std::exp(0.25);
  CHECK(pb.data.p(x0) == doctest::Approx(expect_p).epsilon(1e-14));
  CHECK(pb.data.p(x0) == doctest::Approx(-1.27778).epsilon(1e-5));
}

TEST_CASE("circle problem: continuity built in") {
  const BenchmarkProblem pb = circle_problem(1.0, 1000.0);
  const SphereSurfaceSample ss = sample_sphere_surface(2, 0.5, 10000, 3, 0);
  for (std::size_t i = 0; i < ss.points.size(); ++i) {
    auto x = ss.points[i];
    CHECK(std::abs(pb.data.p(x)) == 0.0);
    CHECK(std::abs(pb.data.q(x)) == 0.0);
    // solution and weighted flux traces agree across the interface
    const double u1 = pb.u_exact(Region::Inside, x);
    const double u2 = pb.u_exact(Region::Outside, x);
    CHECK(std::abs(u2 - u1) < 1e-10);
    const auto g1 = pb.grad_u_exact(Region::Inside, x);
    const auto g2 = pb.grad_u_exact(Region::Outside, x);
    std::span<const double> n{ss.normals.data() + 2 * i, 2};
    const double flux1 = 1.0 * (g1[0] * n[0] + g1[1] * n[1]);
    const double flux2 = 1000.0 * (g2[0] * n[0] + g2[1] * n[1]);
    CHECK(std::abs(flux2 - flux1) < 1e-10);
  }
  const double xr[2] = {0.5, 0.0};
  CHECK(pb.data.f(Region::Inside, xr) == doctest::Approx(-4.5).epsilon(1e-15));
}

TEST_CASE("sphere problem: value match at the interface and radial source") {
  const BenchmarkProblem pb = sphere_problem(3);
  const double at_r0[3] = {0.4, 0.0, 0.0};
  CHECK(pb.u_exact(Region::Inside, at_r0) == doctest::Approx(0.064).epsilon(1e-15));
  CHECK(pb.u_exact(Region::Outside, at_r0) ==
        doctest::Approx(0.0064 + 0.0576).epsilon(1e-13));

  const double x[3] = {0.2, 0.0, 0.0};
  CHECK(pb.data.f(Region::Inside, x) == doctest::Approx(-2.4).epsilon(1e-14));
  CHECK(pb.data.f(Region::Outside, x) == doctest::Approx(-2.4).epsilon(1e-14));

  CHECK_THROWS_AS(sphere_problem(1), std::invalid_argument);
  CHECK(pb.measures.boundary == 6.0);
  CHECK(pb.data.inner_ball_volume == pb.measures.omega1);
}

TEST_CASE("registry dispatch") {
  CHECK(make_benchmark("flower2d").id == "flower2d");
  CHECK(make_benchmark("sphere_nd", 5).dim == 5);
  CHECK_THROWS_AS(make_benchmark("circle2d"), std::invalid_argument);
  CHECK(make_benchmark("circle2d", 2, 1.0, 1000.0).config_defaults.beta2 == 1000.0);
  CHECK_THROWS_AS(make_benchmark("sphere_nd"), std::invalid_argument);
  CHECK_THROWS_AS(make_benchmark("nope"), std::invalid_argument);
  CHECK(analytic_measures("flower2d").boundary == 8.0);
  CHECK(analytic_measures("sphere_nd", 4).boundary == 8.0);
}

TEST_CASE("verify_problem passes for all registry problems") {
  for (const BenchmarkProblem& pb :
       {circle_problem(1.0, 1000.0), sphere_problem(3), sphere_problem(10),
        flower_problem()}) {
    const VerifyReport rep = verify_problem(pb, 300, 99);
    INFO(pb.id, " detail: ", rep.detail);
    CHECK(rep.pass);
    CHECK(rep.max_pde_residual <= 1e-4);
    CHECK(rep.max_grad_residual <= 1e-6);
    CHECK(rep.max_p_residual <= 1e-10);
    CHECK(rep.max_q_residual <= 1e-10);
  }
}

TEST_CASE("verify_problem flags a corrupted source term") {
  BenchmarkProblem pb = circle_problem(1.0, 1000.0);
  auto f = pb.data.f;
  pb.data.f = [f](Region r, std::span<const double> x) { return f(r, x) + 1.0; };
  const VerifyReport rep = verify_problem(pb, 100, 99);
  CHECK(!rep.pass);
  CHECK(rep.max_pde_residual > 1e-2);
  CHECK(rep.detail.find("pde residual") != std::string::npos);
}

TEST_CASE("exact solution evaluates to zero self-error") {
  const BenchmarkProblem pb = sphere_problem(3);
  const double err = relative_l2_error(evaluator_from_exact(pb), pb, 2000, 5);
  CHECK(err == 0.0);
}
