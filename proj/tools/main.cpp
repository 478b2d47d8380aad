#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dunm/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"deep unfitted Nitsche solver for elliptic interface problems"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "train a configured experiment");
  run->add_option("config", config_path, "experiment config file")->required();

  std::string benchmark;
  int dimension = 0;
  std::optional<double> beta1, beta2;
  std::int64_t n_samples = 1000000;
  std::uint64_t seed = 1;
  std::int64_t n_points = 10000;
  std::string checkpoint_dir;

  CLI::App* verify = app.add_subcommand("verify", "check a benchmark's closed forms, "
                                                  "measures and energy stationarity");
  verify->add_option("benchmark", benchmark, "flower2d | circle2d | sphere_nd")
      ->required();
  verify->add_option("--dimension", dimension, "sphere_nd dimension");
  verify->add_option("--beta1", beta1);
  verify->add_option("--beta2", beta2);

  CLI::App* measure = app.add_subcommand("measure", "analytic vs hit-or-miss measures");
  measure->add_option("benchmark", benchmark)->required();
  measure->add_option("--dimension", dimension, "sphere_nd dimension");
  measure->add_option("--n", n_samples, "sample count");
  measure->add_option("--seed", seed);

  CLI::App* eval = app.add_subcommand("eval", "relative L2 error of saved checkpoints");
  eval->add_option("checkpoints", checkpoint_dir,
                   "directory holding checkpoint_inner.json / checkpoint_outer.json")
      ->required();
  eval->add_option("benchmark", benchmark)->required();
  eval->add_option("--dimension", dimension, "sphere_nd dimension");
  eval->add_option("--beta1", beta1);
  eval->add_option("--beta2", beta2);
  eval->add_option("--points", n_points, "evaluation points");
  eval->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      dunm::run_experiment(dunm::parse_config_file(config_path), std::cout);
      return 0;
    }
    if (verify->parsed())
      return dunm::run_verify(benchmark, dimension, beta1, beta2, std::cout);
    if (measure->parsed())
      return dunm::run_measure(benchmark, dimension, n_samples, seed, std::cout);
    if (eval->parsed())
      return dunm::run_eval(checkpoint_dir, benchmark, dimension, beta1, beta2,
                            n_points, seed, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
