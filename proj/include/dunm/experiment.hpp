#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <optional>
#include <string>

#include "dunm/benchmarks.hpp"
#include "dunm/loss.hpp"
#include "dunm/sampling.hpp"
#include "dunm/training.hpp"

namespace dunm {

struct ExperimentConfig {
  std::string benchmark;
  int dimension = 0;  // sphere_nd only
  std::optional<double> beta1, beta2;
  double gamma_f = 0.0;  // required, no default
  double gamma_b = 0.0;
  int width = 0;
  int blocks = 0;
  SamplingPlan plan;
  TrainingSchedule schedule;
  std::uint64_t seed_init = 1, seed_sample = 2, seed_eval = 3;
  LossModes modes;
  std::string output_dir;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value text with [arch] [plan] [schedule] [seeds] [modes] sections.
// Unknown keys are rejected with file/line context; per-benchmark defaults are
// filled for everything except benchmark, gamma_f, output_dir (and beta1/
// beta2 for circle2d, dimension for sphere_nd).
ExperimentConfig parse_config(const std::string& text, const std::string& filename);
ExperimentConfig parse_config_file(const std::string& path);

// Resolved-config echo; parsing it back yields the identical configuration.
std::string render_config(const ExperimentConfig& cfg);

BenchmarkProblem problem_from_config(const ExperimentConfig& cfg);
NitscheConfig nitsche_from_config(const ExperimentConfig& cfg);
NetworkPair initial_pair(const ExperimentConfig& cfg, const BenchmarkProblem& problem);

// Output directory after applying the DUNM_OUTPUT_ROOT override.
std::string resolve_output_dir(const std::string& output_dir);

// Writes config_resolved.ini, history.csv, checkpoint_{inner,outer}.json and,
// for two-dimensional problems, solution_grid.csv (201 x 201).
void run_experiment(const ExperimentConfig& cfg, std::ostream& log);

int run_verify(const std::string& benchmark, int dimension,
               std::optional<double> beta1, std::optional<double> beta2,
               std::ostream& out);

int run_measure(const std::string& benchmark, int dimension, std::int64_t n,
                std::uint64_t seed, std::ostream& out);

int run_eval(const std::string& checkpoint_dir, const std::string& benchmark,
             int dimension, std::optional<double> beta1, std::optional<double> beta2,
             std::int64_t n_points, std::uint64_t seed, std::ostream& out);

// Random smooth piecewise field times a bubble vanishing on the box boundary;
// an admissible direction for stationarity checks of the energy.
PiecewiseEvaluator random_bubble_direction(const BenchmarkProblem& problem,
                                           std::uint64_t seed);

// history.csv helpers (17 significant digits; exact round-trip)
void write_history_header(std::ostream& os);
void write_history_row(std::ostream& os, const TrainingRecord& rec);
TrainingHistory read_history_csv(const std::string& path);

}  // namespace dunm
