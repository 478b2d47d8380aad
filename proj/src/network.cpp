#include "dunm/network.hpp"

#include <cmath>
#include <stdexcept>

#include "dunm/random.hpp"
#include "json.hpp"

namespace dunm {

void validate_arch(const NetworkArch& arch) {
  if (arch.input_dim < 1 || arch.width < 1 || arch.blocks < 0)
    throw std::invalid_argument("network arch requires d >= 1, m >= 1, n >= 0");
}

std::size_t param_count(const NetworkArch& arch) {
  validate_arch(arch);
  const std::size_t d = arch.input_dim, m = arch.width, n = arch.blocks;
  return m * (d + 1) + 2 * n * m * (m + 1) + (m + 1);
}

ParameterVector xavier_init(const NetworkArch& arch, std::uint64_t seed) {
  validate_arch(arch);
  const ParamLayout lay(arch);
  ParameterVector p(lay.total(), 0.0);
  Rng rng(seed, RngStream::Xavier);

  auto fill = [&](std::size_t offset, int rows, int cols) {
    const double a = std::sqrt(6.0 / (rows + cols));
    for (int i = 0; i < rows * cols; ++i) p[offset + i] = rng.uniform(-a, a);
  };

  fill(lay.w_in(), lay.m, lay.d);
  for (int i = 0; i < lay.n; ++i) {
    fill(lay.block_w(i, 0), lay.m, lay.m);
    fill(lay.block_w(i, 1), lay.m, lay.m);
  }
  fill(lay.w_out(), 1, lay.m);
  return p;
}

double forward(const NetworkArch& arch, std::span<const double> params,
               std::span<const double> x) {
  validate_arch(arch);
  const ParamLayout lay(arch);
  if (params.size() != lay.total())
    throw std::invalid_argument("parameter vector length mismatch");
  if (static_cast<int>(x.size()) != lay.d)
    throw std::invalid_argument("input dimension mismatch");

  const int m = lay.m;
  std::vector<double> s(m), t(m);

  const double* w = params.data() + lay.w_in();
  const double* b = params.data() + lay.b_in();
  for (int j = 0; j < m; ++j) {
    double acc = b[j];
    for (int k = 0; k < lay.d; ++k) acc += w[j * lay.d + k] * x[k];
    s[j] = acc;
  }

  for (int i = 0; i < lay.n; ++i) {
    const double* w1 = params.data() + lay.block_w(i, 0);
    const double* b1 = params.data() + lay.block_b(i, 0);
    const double* w2 = params.data() + lay.block_w(i, 1);
    const double* b2 = params.data() + lay.block_b(i, 1);
    for (int j = 0; j < m; ++j) {
      double acc = b1[j];
      for (int k = 0; k < m; ++k) acc += w1[j * m + k] * s[k];
      t[j] = std::tanh(acc);
    }
    for (int j = 0; j < m; ++j) {
      double acc = b2[j];
      for (int k = 0; k < m; ++k) acc += w2[j * m + k] * t[k];
      s[j] += std::tanh(acc);  // identity skip
    }
  }

  const double* wo = params.data() + lay.w_out();
  double out = params[lay.b_out()];
  for (int k = 0; k < m; ++k) out += wo[k] * s[k];
  return out;
}

std::string serialize(const Checkpoint& cp) {
  validate_arch(cp.arch);
  if (cp.params.size() != param_count(cp.arch))
    throw std::invalid_argument("checkpoint params length does not match arch");
  nlohmann::json j;
  j["arch"] = {{"input_dim", cp.arch.input_dim},
               {"width", cp.arch.width},
               {"blocks", cp.arch.blocks},
               {"activation", "tanh"}};
  j["params"] = cp.params;
  j["region"] = cp.region;
  j["seed"] = cp.seed;
  j["epoch"] = cp.epoch;
  return j.dump(1);
}

Checkpoint deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
  }
  Checkpoint cp;
  try {
    const auto& a = j.at("arch");
    cp.arch.input_dim = a.at("input_dim").get<int>();
    cp.arch.width = a.at("width").get<int>();
    cp.arch.blocks = a.at("blocks").get<int>();
    if (a.at("activation").get<std::string>() != "tanh")
      throw std::runtime_error("unsupported activation in checkpoint");
    cp.params = j.at("params").get<std::vector<double>>();
    cp.region = j.at("region").get<std::string>();
    cp.seed = j.at("seed").get<std::uint64_t>();
    cp.epoch = j.at("epoch").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
  }
  validate_arch(cp.arch);
  if (cp.params.size() != param_count(cp.arch))
    throw std::runtime_error("checkpoint parameter array length does not match arch");
  if (cp.region != "inner" && cp.region != "outer")
    throw std::runtime_error("checkpoint region must be 'inner' or 'outer'");
  return cp;
}

}  // namespace dunm
