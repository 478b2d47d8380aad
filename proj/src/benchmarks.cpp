#include "dunm/benchmarks.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dunm/random.hpp"

namespace dunm {

namespace {

double radius2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

std::string point_str(std::span<const double> x) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6g", x[i]);
    s += buf;
    if (i + 1 < x.size()) s += ", ";
  }
  return s + ")";
}

}  // namespace

BenchmarkProblem flower_problem(double beta1, double beta2) {
  BenchmarkProblem pb;
  pb.id = "flower2d";
  pb.dim = 2;
  pb.geom = make_flower_levelset();
  pb.config_defaults = NitscheConfig{beta1, beta2, 1000.0, 5000.0};
  pb.interface_kind = InterfaceKind::FlowerPolar;
  pb.measures = analytic_measures_flower();

  pb.u_exact = [](Region r, std::span<const double> x) {
    const double r2 = radius2(x);
    if (r == Region::Inside) return std::exp(r2);
    return 0.1 * r2 * r2 - 0.01 * std::log(2.0 * std::sqrt(r2));
  };
  pb.grad_u_exact = [](Region r, std::span<const double> x) {
    const double r2 = radius2(x);
    std::vector<double> g(2);
    if (r == Region::Inside) {
      const double c = 2.0 * std::exp(r2);
      g[0] = c * x[0];
      g[1] = c * x[1];
    } else {
      const double c = 0.4 * r2 - 0.01 / r2;
      g[0] = c * x[0];
      g[1] = c * x[1];
    }
    return g;
  };
  pb.data.f = [beta1, beta2](Region r, std::span<const double> x) {
    const double r2 = radius2(x);
    if (r == Region::Inside) return -beta1 * (4.0 * r2 + 4.0) * std::exp(r2);
    return -beta2 * 1.6 * r2;  // the log term is harmonic in 2D
  };
  pb.data.p = [](std::span<const double> x) {
    const double r2 = radius2(x);
    return 0.1 * r2 * r2 - 0.01 * std::log(2.0 * std::sqrt(r2)) - std::exp(r2);
  };
  {
    const LevelSetInterface geom = pb.geom;
    pb.data.q = [geom, beta1, beta2](std::span<const double> x) {
      const double r2 = radius2(x);
      const std::vector<double> n = unit_normal(geom, x);
      const double xdotn = x[0] * n[0] + x[1] * n[1];
      return xdotn * (beta2 * (0.4 * r2 - 0.01 / r2) - beta1 * 2.0 * std::exp(r2));
    };
  }
  {
    auto u = pb.u_exact;
    pb.data.g = [u](std::span<const double> x) { return u(Region::Outside, x); };
  }
  return pb;
}

BenchmarkProblem circle_problem(double beta1, double beta2, double r0) {
  if (!(beta1 > 0.0) || !(beta2 > 0.0))
    throw std::invalid_argument("circle_problem: betas must be positive");
  BenchmarkProblem pb;
  pb.id = "circle2d";
  pb.dim = 2;
  pb.geom = make_sphere_levelset(2, r0, symmetric_box(2, 1.0));
  pb.config_defaults = NitscheConfig{beta1, beta2, 1000.0, 5000.0};
  pb.interface_kind = InterfaceKind::Sphere;
  pb.interface_r0 = r0;
  pb.measures = analytic_measures_circle(r0);

  const double shift = (1.0 / beta1 - 1.0 / beta2) * r0 * r0 * r0;
  pb.u_exact = [beta1, beta2, shift](Region r, std::span<const double> x) {
    const double rr = std::sqrt(radius2(x));
    if (r == Region::Inside) return rr * rr * rr / beta1;
    return rr * rr * rr / beta2 + shift;
  };
  pb.grad_u_exact = [beta1, beta2](Region r, std::span<const double> x) {
    const double rr = std::sqrt(radius2(x));
    const double c = 3.0 * rr / (r == Region::Inside ? beta1 : beta2);
    return std::vector<double>{c * x[0], c * x[1]};
  };
  pb.data.f = [](Region, std::span<const double> x) {
    return -9.0 * std::sqrt(radius2(x));
  };
  pb.data.p = [](std::span<const double>) { return 0.0; };
  pb.data.q = [](std::span<const double>) { return 0.0; };
  {
    auto u = pb.u_exact;
    pb.data.g = [u](std::span<const double> x) { return u(Region::Outside, x); };
  }
  return pb;
}

BenchmarkProblem sphere_problem(int d, double beta1, double beta2) {
  if (d < 2) throw std::invalid_argument("sphere_problem: d >= 2 required");
  const double r0 = 0.4;
  BenchmarkProblem pb;
  pb.id = "sphere_nd";
  pb.dim = d;
  pb.geom = make_sphere_levelset(d, r0, symmetric_box(d, 0.5));
  pb.config_defaults = NitscheConfig{beta1, beta2, 500.0, 3000.0};
  pb.interface_kind = InterfaceKind::Sphere;
  pb.interface_r0 = r0;
  pb.measures = analytic_measures_sphere(d, r0);

  const double c = beta1 / beta2;
  const double shift = (1.0 - c) * r0 * r0 * r0;
  pb.u_exact = [c, shift](Region r, std::span<const double> x) {
    const double rr = std::sqrt(radius2(x));
    if (r == Region::Inside) return rr * rr * rr;
    return c * rr * rr * rr + shift;
  };
  pb.grad_u_exact = [c, d](Region r, std::span<const double> x) {
    const double rr = std::sqrt(radius2(x));
    const double s = 3.0 * rr * (r == Region::Inside ? 1.0 : c);
    std::vector<double> g(d);
    for (int i = 0; i < d; ++i) g[i] = s * x[i];
    return g;
  };
  pb.data.f = [beta1, d](Region, std::span<const double> x) {
    return -beta1 * 3.0 * (d + 1) * std::sqrt(radius2(x));
  };
  pb.data.p = [](std::span<const double>) { return 0.0; };
  pb.data.q = [](std::span<const double>) { return 0.0; };
  {
    auto u = pb.u_exact;
    pb.data.g = [u](std::span<const double> x) { return u(Region::Outside, x); };
  }
  pb.data.inner_ball_volume = pb.measures.omega1;
  pb.data.inner_ball_r0 = r0;
  return pb;
}

BenchmarkProblem make_benchmark(std::string_view id, int dimension,
                                std::optional<double> beta1,
                                std::optional<double> beta2) {
  if (id == "flower2d") {
    if (dimension != 0 && dimension != 2)
      throw std::invalid_argument("flower2d is two-dimensional");
    return flower_problem(beta1.value_or(1.0), beta2.value_or(10.0));
  }
  if (id == "circle2d") {
    if (dimension != 0 && dimension != 2)
      throw std::invalid_argument("circle2d is two-dimensional");
    if (!beta1 || !beta2)
      throw std::invalid_argument("circle2d requires beta1 and beta2");
    return circle_problem(*beta1, *beta2);
  }
  if (id == "sphere_nd") {
    if (dimension < 2)
      throw std::invalid_argument("sphere_nd requires dimension >= 2");
    return sphere_problem(dimension, beta1.value_or(1.0), beta2.value_or(10.0));
  }
  throw std::invalid_argument("unknown benchmark id: " + std::string(id));
}

GeometryMeasures analytic_measures(std::string_view benchmark_id, int dimension) {
  if (benchmark_id == "flower2d") return analytic_measures_flower();
  if (benchmark_id == "circle2d") return analytic_measures_circle(0.5);
  if (benchmark_id == "sphere_nd") {
    if (dimension < 2)
      throw std::invalid_argument("sphere_nd requires dimension >= 2");
    return analytic_measures_sphere(dimension, 0.4);
  }
  throw std::invalid_argument("unknown benchmark id: " + std::string(benchmark_id));
}

PiecewiseEvaluator evaluator_from_exact(const BenchmarkProblem& problem) {
  PiecewiseEvaluator ev;
  auto u = problem.u_exact;
  auto gu = problem.grad_u_exact;
  ev.eval = [u, gu](Region r, std::span<const double> x) {
    return DualPoint{u(r, x), gu(r, x)};
  };
  ev.value = u;
  return ev;
}

namespace {

// interior verification points with a level-set margin; the ball sampler
// covers thin high-dimensional inside regions where rejection would stall
PointSet verify_points(const BenchmarkProblem& pb, Region region, std::size_t n,
                       std::uint64_t seed) {
  const int d = pb.dim;
  const double margin = 1e-2;
  PointSet pts{d, {}};
  Rng rng(seed, RngStream::Verify,
          region == Region::Inside ? 1 : 2);
  std::vector<double> x(d);
  std::size_t guard = 0;
  const std::size_t guard_max = 2000000;
  if (region == Region::Inside && pb.interface_kind == InterfaceKind::Sphere) {
    // uniform in the slightly shrunk ball; rejection from the box would stall
    // in high dimension
    return sample_ball_dropped_coords(d, pb.interface_r0 - margin,
                                      static_cast<std::int64_t>(n), seed);
  }
  while (pts.size() < n && guard++ < guard_max) {
    for (int j = 0; j < d; ++j) x[j] = rng.uniform(pb.geom.box.lo[j], pb.geom.box.hi[j]);
    const double phi = pb.geom.phi(x);
    if (region == Region::Inside) {
      if (phi < -margin && std::sqrt(radius2(x)) > 0.05) pts.push(x);
    } else {
      if (phi > margin) pts.push(x);
    }
  }
  if (pts.size() < n)
    throw std::runtime_error("verify_points: rejection sampling stalled");
  return pts;
}

}  // namespace

VerifyReport verify_problem(const BenchmarkProblem& problem, std::size_t n_check,
                            std::uint64_t seed) {
  if (n_check < 1) throw std::invalid_argument("verify_problem: n_check >= 1");
  VerifyReport rep;
  const int d = problem.dim;
  const double h_lap = 1e-4, h_grad = 1e-5;
  const double pde_tol = 1e-4, grad_tol = 1e-6, jump_tol = 1e-10;

  auto note_failure = [&](const char* what, std::span<const double> x, double resid) {
    if (rep.detail.empty()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " residual %.3e", resid);
      rep.detail = std::string(what) + " at " + point_str(x) + buf;
    }
  };

  for (Region region : {Region::Inside, Region::Outside}) {
    const double beta = (region == Region::Inside) ? problem.config_defaults.beta1
                                                   : problem.config_defaults.beta2;
    const PointSet pts = verify_points(problem, region, n_check, seed);
    std::vector<double> xs(d);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto x = pts[i];
      std::copy(x.begin(), x.end(), xs.begin());

      // (a) -beta * laplacian(u) against f
      const double u0 = problem.u_exact(region, xs);
      double lap = 0.0;
      for (int j = 0; j < d; ++j) {
        const double saved = xs[j];
        xs[j] = saved + h_lap;
        const double up = problem.u_exact(region, xs);
        xs[j] = saved - h_lap;
        const double um = problem.u_exact(region, xs);
        xs[j] = saved;
        lap += (up - 2.0 * u0 + um) / (h_lap * h_lap);
      }
      const double f_x = problem.data.f(region, xs);
      const double pde_res = std::abs(-beta * lap - f_x) / std::max(1.0, std::abs(f_x));
      rep.max_pde_residual = std::max(rep.max_pde_residual, pde_res);
      if (pde_res > pde_tol) note_failure("pde residual", x, pde_res);

      // (b) stored gradient against finite differences of u
      const std::vector<double> g = problem.grad_u_exact(region, xs);
      double gscale = 1.0;
      for (double v : g) gscale = std::max(gscale, std::abs(v));
      double gres = 0.0;
      for (int j = 0; j < d; ++j) {
        const double saved = xs[j];
        xs[j] = saved + h_grad;
        const double up = problem.u_exact(region, xs);
        xs[j] = saved - h_grad;
        const double um = problem.u_exact(region, xs);
        xs[j] = saved;
        gres = std::max(gres, std::abs((up - um) / (2.0 * h_grad) - g[j]));
      }
      gres /= gscale;
      rep.max_grad_residual = std::max(rep.max_grad_residual, gres);
      if (gres > grad_tol) note_failure("gradient residual", x, gres);
    }
  }

  // (c) jump data against solution traces at interface samples
  {
    PointSet ipts;
    std::vector<double> normals;
    if (problem.interface_kind == InterfaceKind::FlowerPolar) {
      FlowerInterfaceSample fs =
          sample_flower_interface(static_cast<std::int64_t>(n_check), seed);
      ipts = std::move(fs.points);
      normals = std::move(fs.normals);
    } else {
      SphereSurfaceSample ss = sample_sphere_surface(
          d, problem.interface_r0, static_cast<std::int64_t>(n_check), seed);
      ipts = std::move(ss.points);
      normals = std::move(ss.normals);
    }
    const double b1 = problem.config_defaults.beta1;
    const double b2 = problem.config_defaults.beta2;
    for (std::size_t i = 0; i < ipts.size(); ++i) {
      auto x = ipts[i];
      std::span<const double> n{normals.data() + i * d, static_cast<std::size_t>(d)};
      const double pj = problem.u_exact(Region::Outside, x) -
                        problem.u_exact(Region::Inside, x);
      const double p_res =
          std::abs(problem.data.p(x) - pj) / std::max(1.0, std::abs(pj));
      rep.max_p_residual = std::max(rep.max_p_residual, p_res);
      if (p_res > jump_tol) note_failure("value-jump residual", x, p_res);

      const std::vector<double> g1 = problem.grad_u_exact(Region::Inside, x);
      const std::vector<double> g2 = problem.grad_u_exact(Region::Outside, x);
      double qj = 0.0;
      for (int j = 0; j < d; ++j) qj += (b2 * g2[j] - b1 * g1[j]) * n[j];
      const double q_res =
          std::abs(problem.data.q(x) - qj) / std::max(1.0, std::abs(qj));
      rep.max_q_residual = std::max(rep.max_q_residual, q_res);
      if (q_res > jump_tol) note_failure("flux-jump residual", x, q_res);
    }
  }

  // boundary data against the outer trace
  {
    const PointSet bpts = sample_cube_boundary(
        d, problem.geom.box, static_cast<std::int64_t>(n_check), seed);
    for (std::size_t i = 0; i < bpts.size(); ++i) {
      auto x = bpts[i];
      const double u2 = problem.u_exact(Region::Outside, x);
      const double res =
          std::abs(problem.data.g(x) - u2) / std::max(1.0, std::abs(u2));
      rep.max_g_residual = std::max(rep.max_g_residual, res);
      if (res > jump_tol) note_failure("boundary-data residual", x, res);
    }
  }

  rep.pass = rep.max_pde_residual <= pde_tol && rep.max_grad_residual <= grad_tol &&
             rep.max_p_residual <= jump_tol && rep.max_q_residual <= jump_tol &&
             rep.max_g_residual <= jump_tol;
  return rep;
}

}  // namespace dunm
