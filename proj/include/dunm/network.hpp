#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dunm {

enum class Activation { Tanh };

// Residual ansatz network: an input layer d -> m, n residual blocks of two
// tanh layers with an identity skip, and a linear output layer m -> 1.
struct NetworkArch {
  int input_dim = 0;  // d
  int width = 0;      // m
  int blocks = 0;     // n
  Activation activation = Activation::Tanh;

  friend bool operator==(const NetworkArch&, const NetworkArch&) = default;
};

void validate_arch(const NetworkArch& arch);

// m(d+1) + 2 n m(m+1) + (m+1)
std::size_t param_count(const NetworkArch& arch);

// Offsets of the weight matrices and bias vectors inside the flat parameter
// vector. Order: W_in, b_in, then per block (W1, b1, W2, b2), then W_out,
// b_out. Matrices are row-major.
struct ParamLayout {
  int d = 0, m = 0, n = 0;

  explicit ParamLayout(const NetworkArch& arch)
      : d(arch.input_dim), m(arch.width), n(arch.blocks) {}

  std::size_t w_in() const { return 0; }
  std::size_t b_in() const { return static_cast<std::size_t>(m) * d; }
  std::size_t block_base(int i) const {
    return b_in() + m + static_cast<std::size_t>(i) * 2 * m * (m + 1);
  }
  // j = 0 or 1, the two layers of a block
  std::size_t block_w(int i, int j) const {
    return block_base(i) + static_cast<std::size_t>(j) * m * (m + 1);
  }
  std::size_t block_b(int i, int j) const {
    return block_w(i, j) + static_cast<std::size_t>(m) * m;
  }
  std::size_t w_out() const { return block_base(n); }
  std::size_t b_out() const { return w_out() + m; }
  std::size_t total() const { return b_out() + 1; }
};

using ParameterVector = std::vector<double>;

// Uniform Xavier: weights ~ U(-a, a) with a = sqrt(6 / (fan_in + fan_out)),
// biases zero. Deterministic in the seed.
ParameterVector xavier_init(const NetworkArch& arch, std::uint64_t seed);

double forward(const NetworkArch& arch, std::span<const double> params,
               std::span<const double> x);

struct Network {
  NetworkArch arch;
  ParameterVector params;
};

// The two ansatz functions: one per side of the interface.
struct NetworkPair {
  Network inner;  // region where the level set is negative
  Network outer;
};

struct Checkpoint {
  NetworkArch arch;
  ParameterVector params;
  std::string region;  // "inner" | "outer"
  std::uint64_t seed = 0;
  std::int64_t epoch = 0;
};

// JSON text; doubles round-trip bit-exactly.
std::string serialize(const Checkpoint& cp);
Checkpoint deserialize(const std::string& text);

}  // namespace dunm
