#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "dunm/geometry.hpp"
#include "dunm/loss.hpp"
#include "dunm/sampling.hpp"

namespace dunm {

// One test problem: level-set geometry, closed-form solution and data, exact
// measures, and the penalty/diffusion defaults used for it.
struct BenchmarkProblem {
  std::string id;
  int dim = 2;
  LevelSetInterface geom;
  NitscheConfig config_defaults;
  std::function<double(Region, std::span<const double>)> u_exact;
  std::function<std::vector<double>(Region, std::span<const double>)> grad_u_exact;
  ProblemData data;
  GeometryMeasures measures;
  InterfaceKind interface_kind = InterfaceKind::Sphere;
  double interface_r0 = 0.0;

  DomainSpec domain_spec() const { return {&geom, interface_kind, interface_r0}; }
};

// Polar flower interface in [-1,1]^2 with inhomogeneous value and flux jumps.
BenchmarkProblem flower_problem(double beta1 = 1.0, double beta2 = 10.0);

// Circle of radius r0 in [-1,1]^2, homogeneous jumps; the solution scales
// with 1/beta per side, so the contrast is a free parameter.
BenchmarkProblem circle_problem(double beta1, double beta2, double r0 = 0.5);

// Sphere of radius 0.4 in [-1/2,1/2]^d, homogeneous jumps.
BenchmarkProblem sphere_problem(int d, double beta1 = 1.0, double beta2 = 10.0);

// ids: flower2d, circle2d, sphere_nd
BenchmarkProblem make_benchmark(std::string_view id, int dimension = 0,
                                std::optional<double> beta1 = {},
                                std::optional<double> beta2 = {});

GeometryMeasures analytic_measures(std::string_view benchmark_id, int dimension = 0);

PiecewiseEvaluator evaluator_from_exact(const BenchmarkProblem& problem);

// Self-consistency of the stored closed forms: finite-difference operator
// against f, stored gradients against finite differences of u, jump data
// against the solution traces, boundary data against the outer trace.
struct VerifyReport {
  double max_pde_residual = 0.0;    // relative, tolerance 1e-4
  double max_grad_residual = 0.0;   // relative, tolerance 1e-6
  double max_p_residual = 0.0;      // tolerance 1e-10
  double max_q_residual = 0.0;      // tolerance 1e-10
  double max_g_residual = 0.0;      // tolerance 1e-10
  bool pass = false;
  std::string detail;  // names the first failing check and point
};

VerifyReport verify_problem(const BenchmarkProblem& problem, std::size_t n_check,
                            std::uint64_t seed);

}  // namespace dunm
