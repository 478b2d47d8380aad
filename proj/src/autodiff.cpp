#include "dunm/autodiff.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace dunm {

DualPoint value_and_spatial_gradient(const NetworkArch& arch,
                                     std::span<const double> params,
                                     std::span<const double> x) {
  validate_arch(arch);
  const ParamLayout lay(arch);
  if (params.size() != lay.total())
    throw std::invalid_argument("parameter vector length mismatch");
  if (static_cast<int>(x.size()) != lay.d)
    throw std::invalid_argument("input dimension mismatch");

  const int m = lay.m, d = lay.d;
  std::vector<double> s(m), st(static_cast<std::size_t>(m) * d);
  std::vector<double> t(m), tt(static_cast<std::size_t>(m) * d);

  // input layer: tangent of W x + b w.r.t. x is W itself
  {
    const double* w = params.data() + lay.w_in();
    const double* b = params.data() + lay.b_in();
    for (int j = 0; j < m; ++j) {
      double acc = b[j];
      for (int k = 0; k < d; ++k) acc += w[j * d + k] * x[k];
      s[j] = acc;
      for (int k = 0; k < d; ++k) st[j * d + k] = w[j * d + k];
    }
  }

  auto affine_tanh = [&](const double* w, const double* b,
                         const std::vector<double>& in, const std::vector<double>& in_t,
                         std::vector<double>& out, std::vector<double>& out_t, int cols) {
    for (int j = 0; j < m; ++j) {
      double acc = b[j];
      for (int k = 0; k < cols; ++k) acc += w[j * cols + k] * in[k];
      const double y = std::tanh(acc);
      out[j] = y;
      const double sp = 1.0 - y * y;
      for (int dd = 0; dd < d; ++dd) {
        double tacc = 0.0;
        for (int k = 0; k < cols; ++k) tacc += w[j * cols + k] * in_t[k * d + dd];
        out_t[j * d + dd] = sp * tacc;
      }
    }
  };

  std::vector<double> u(m), ut(static_cast<std::size_t>(m) * d);
  for (int i = 0; i < lay.n; ++i) {
    affine_tanh(params.data() + lay.block_w(i, 0), params.data() + lay.block_b(i, 0),
                s, st, t, tt, m);
    affine_tanh(params.data() + lay.block_w(i, 1), params.data() + lay.block_b(i, 1),
                t, tt, u, ut, m);
    for (int j = 0; j < m; ++j) {
      s[j] += u[j];
      for (int dd = 0; dd < d; ++dd) st[j * d + dd] += ut[j * d + dd];
    }
  }

  DualPoint out;
  out.tangent.assign(d, 0.0);
  const double* wo = params.data() + lay.w_out();
  out.value = params[lay.b_out()];
  for (int k = 0; k < m; ++k) {
    out.value += wo[k] * s[k];
    for (int dd = 0; dd < d; ++dd) out.tangent[dd] += wo[k] * st[k * d + dd];
  }
  return out;
}

double forward_value(const NetworkArch& arch, std::span<const double> params,
                     std::span<const double> x, std::vector<double>& scratch) {
  const ParamLayout lay(arch);
  const int m = lay.m;
  scratch.resize(2 * static_cast<std::size_t>(m));
  double* s = scratch.data();
  double* t = scratch.data() + m;

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
      s[j] += std::tanh(acc);
    }
  }
  const double* wo = params.data() + lay.w_out();
  double out = params[lay.b_out()];
  for (int k = 0; k < m; ++k) out += wo[k] * s[k];
  return out;
}

// ---------------------------------------------------------------- Tape

void Tape::reset(std::span<const double> leaf_params) {
  n_leaf_ = static_cast<std::int32_t>(leaf_params.size());
  top_ = n_leaf_;
  if (static_cast<std::int32_t>(val_.size()) < top_) {
    val_.resize(top_);
    adj_.resize(top_);
  }
  std::memcpy(val_.data(), leaf_params.data(), leaf_params.size() * sizeof(double));
  std::memset(adj_.data(), 0, static_cast<std::size_t>(n_leaf_) * sizeof(double));
  nodes_.clear();
  aux_.clear();
}

void Tape::rewind() {
  top_ = n_leaf_;
  nodes_.clear();
  aux_.clear();
}

void Tape::zero_leaf_adjoints() {
  std::memset(adj_.data(), 0, static_cast<std::size_t>(n_leaf_) * sizeof(double));
}

std::int32_t Tape::alloc(std::int32_t n) {
  const std::int32_t base = top_;
  top_ += n;
  if (static_cast<std::int32_t>(val_.size()) < top_) {
    val_.resize(top_);
    adj_.resize(top_);
  }
  return base;
}

std::int32_t Tape::push_aux(std::span<const double> data) {
  const std::int32_t base = static_cast<std::int32_t>(aux_.size());
  aux_.insert(aux_.end(), data.begin(), data.end());
  return base;
}

TScalar Tape::leaf(std::int32_t i) {
  if (i < 0 || i >= n_leaf_) throw std::invalid_argument("leaf index out of range");
  return TScalar{this, i};
}

TSlice Tape::leaf_slice(std::int32_t offset, std::int32_t len) const {
  if (offset < 0 || len < 0 || offset + len > n_leaf_)
    throw std::invalid_argument("leaf slice out of range");
  return TSlice{offset, len};
}

TScalar Tape::constant(double v) {
  const std::int32_t s = alloc(1);
  val_[s] = v;
  return TScalar{this, s};
}

TScalar Tape::add(TScalar a, TScalar b) {
  const std::int32_t s = alloc(1);
  val_[s] = val_[a.slot] + val_[b.slot];
  nodes_.push_back({Op::Add, s, a.slot, b.slot, -1, 0, 0, 0, -1, 0, 0});
  return out_scalar(s);
}

TScalar Tape::sub(TScalar a, TScalar b) {
  const std::int32_t s = alloc(1);
  val_[s] = val_[a.slot] - val_[b.slot];
  nodes_.push_back({Op::Sub, s, a.slot, b.slot, -1, 0, 0, 0, -1, 0, 0});
  return out_scalar(s);
}

TScalar Tape::mul(TScalar a, TScalar b) {
  const std::int32_t s = alloc(1);
  val_[s] = val_[a.slot] * val_[b.slot];
  nodes_.push_back({Op::Mul, s, a.slot, b.slot, -1, 0, 0, 0, -1, 0, 0});
  return out_scalar(s);
}

TScalar Tape::square(TScalar a) {
  const std::int32_t s = alloc(1);
  val_[s] = val_[a.slot] * val_[a.slot];
  nodes_.push_back({Op::Square, s, a.slot, -1, -1, 0, 0, 0, -1, 0, 0});
  return out_scalar(s);
}

TScalar Tape::affine(TScalar a, double scale, double shift) {
  const std::int32_t s = alloc(1);
  val_[s] = scale * val_[a.slot] + shift;
  nodes_.push_back({Op::AffC, s, a.slot, -1, -1, 0, 0, 0, -1, scale, shift});
  return out_scalar(s);
}

TScalar Tape::lincomb(TScalar a, TScalar b, double ca, double cb) {
  const std::int32_t s = alloc(1);
  val_[s] = ca * val_[a.slot] + cb * val_[b.slot];
  nodes_.push_back({Op::LinComb2, s, a.slot, b.slot, -1, 0, 0, 0, -1, ca, cb});
  return out_scalar(s);
}

TScalar Tape::sumsq(TSlice v) {
  const std::int32_t s = alloc(1);
  double acc = 0.0;
  for (std::int32_t i = 0; i < v.len; ++i) acc += val_[v.base + i] * val_[v.base + i];
  val_[s] = acc;
  nodes_.push_back({Op::SumSq, s, v.base, -1, -1, 0, v.len, 0, -1, 0, 0});
  return out_scalar(s);
}

TScalar Tape::dot(TSlice v, std::span<const double> weights) {
  if (static_cast<std::int32_t>(weights.size()) != v.len)
    throw std::invalid_argument("dot: length mismatch");
  const std::int32_t aux = push_aux(weights);
  const std::int32_t s = alloc(1);
  double acc = 0.0;
  for (std::int32_t i = 0; i < v.len; ++i) acc += val_[v.base + i] * aux_[aux + i];
  val_[s] = acc;
  nodes_.push_back({Op::DotAux, s, v.base, -1, -1, 0, v.len, 0, aux, 0, 0});
  return out_scalar(s);
}

Tape::DualVec Tape::dual_input(TSlice w, TSlice b, std::span<const double> x) {
  const std::int32_t d = static_cast<std::int32_t>(x.size());
  const std::int32_t m = b.len;
  if (w.len != m * d) throw std::invalid_argument("dual_input: weight shape mismatch");
  const std::int32_t aux = push_aux(x);
  const std::int32_t base = alloc(m + m * d);
  const double* W = &val_[w.base];
  const double* B = &val_[b.base];
  for (std::int32_t j = 0; j < m; ++j) {
    double acc = B[j];
    for (std::int32_t k = 0; k < d; ++k) acc += W[j * d + k] * x[k];
    val_[base + j] = acc;
    for (std::int32_t k = 0; k < d; ++k) val_[base + m + j * d + k] = W[j * d + k];
  }
  nodes_.push_back({Op::DualIn, base, w.base, b.base, -1, m, d, d, aux, 0, 0});
  return DualVec{base, m, d};
}

Tape::DualVec Tape::dual_affine(TSlice w, TSlice b, DualVec in, std::int32_t rows) {
  const std::int32_t k = in.width, d = in.dim;
  if (w.len != rows * k || b.len != rows)
    throw std::invalid_argument("dual_affine: shape mismatch");
  const std::int32_t base = alloc(rows + rows * d);
  const double* W = &val_[w.base];
  const double* B = &val_[b.base];
  const double* S = &val_[in.base];
  const double* T = &val_[in.base + k];
  for (std::int32_t j = 0; j < rows; ++j) {
    double acc = B[j];
    for (std::int32_t kk = 0; kk < k; ++kk) acc += W[j * k + kk] * S[kk];
    val_[base + j] = acc;
    double* to = &val_[base + rows + j * d];
    for (std::int32_t dd = 0; dd < d; ++dd) to[dd] = 0.0;
    for (std::int32_t kk = 0; kk < k; ++kk) {
      const double wv = W[j * k + kk];
      const double* ti = T + kk * d;
      for (std::int32_t dd = 0; dd < d; ++dd) to[dd] += wv * ti[dd];
    }
  }
  nodes_.push_back({Op::DualAffine, base, w.base, b.base, in.base, rows, k, d, -1, 0, 0});
  return DualVec{base, rows, d};
}

Tape::DualVec Tape::dual_tanh(DualVec in) {
  const std::int32_t m = in.width, d = in.dim;
  const std::int32_t base = alloc(m + m * d);
  for (std::int32_t j = 0; j < m; ++j) {
    const double y = std::tanh(val_[in.base + j]);
    val_[base + j] = y;
    const double sp = 1.0 - y * y;
    for (std::int32_t dd = 0; dd < d; ++dd)
      val_[base + m + j * d + dd] = sp * val_[in.base + m + j * d + dd];
  }
  nodes_.push_back({Op::DualTanh, base, in.base, -1, -1, m, 0, d, -1, 0, 0});
  return DualVec{base, m, d};
}

Tape::DualVec Tape::dual_add(DualVec a, DualVec b) {
  if (a.width != b.width || a.dim != b.dim)
    throw std::invalid_argument("dual_add: shape mismatch");
  const std::int32_t m = a.width, d = a.dim;
  const std::int32_t n = m + m * d;
  const std::int32_t base = alloc(n);
  for (std::int32_t i = 0; i < n; ++i)
    val_[base + i] = val_[a.base + i] + val_[b.base + i];
  nodes_.push_back({Op::DualAdd, base, a.base, b.base, -1, m, 0, d, -1, 0, 0});
  return DualVec{base, m, d};
}

TSlice Tape::value_input(TSlice w, TSlice b, std::span<const double> x) {
  const std::int32_t d = static_cast<std::int32_t>(x.size());
  const std::int32_t m = b.len;
  if (w.len != m * d) throw std::invalid_argument("value_input: weight shape mismatch");
  const std::int32_t aux = push_aux(x);
  const std::int32_t base = alloc(m);
  for (std::int32_t j = 0; j < m; ++j) {
    double acc = val_[b.base + j];
    for (std::int32_t k = 0; k < d; ++k) acc += val_[w.base + j * d + k] * x[k];
    val_[base + j] = acc;
  }
  nodes_.push_back({Op::ValIn, base, w.base, b.base, -1, m, d, 0, aux, 0, 0});
  return TSlice{base, m};
}

TSlice Tape::value_affine(TSlice w, TSlice b, TSlice in, std::int32_t rows) {
  const std::int32_t k = in.len;
  if (w.len != rows * k || b.len != rows)
    throw std::invalid_argument("value_affine: shape mismatch");
  const std::int32_t base = alloc(rows);
  for (std::int32_t j = 0; j < rows; ++j) {
    double acc = val_[b.base + j];
    for (std::int32_t kk = 0; kk < k; ++kk) acc += val_[w.base + j * k + kk] * val_[in.base + kk];
    val_[base + j] = acc;
  }
  nodes_.push_back({Op::ValAffine, base, w.base, b.base, in.base, rows, k, 0, -1, 0, 0});
  return TSlice{base, rows};
}

TSlice Tape::value_tanh(TSlice in) {
  const std::int32_t base = alloc(in.len);
  for (std::int32_t j = 0; j < in.len; ++j) val_[base + j] = std::tanh(val_[in.base + j]);
  nodes_.push_back({Op::ValTanh, base, in.base, -1, -1, in.len, 0, 0, -1, 0, 0});
  return TSlice{base, in.len};
}

TSlice Tape::value_add(TSlice a, TSlice b) {
  if (a.len != b.len) throw std::invalid_argument("value_add: length mismatch");
  const std::int32_t base = alloc(a.len);
  for (std::int32_t j = 0; j < a.len; ++j)
    val_[base + j] = val_[a.base + j] + val_[b.base + j];
  nodes_.push_back({Op::ValAdd, base, a.base, b.base, -1, a.len, 0, 0, -1, 0, 0});
  return TSlice{base, a.len};
}

void Tape::backward(TScalar root, double seed) {
  if (root.tape != this) throw std::invalid_argument("backward: foreign tape handle");
  // intermediates get fresh adjoints; leaf adjoints keep accumulating
  std::memset(adj_.data() + n_leaf_, 0,
              static_cast<std::size_t>(top_ - n_leaf_) * sizeof(double));
  adj_[root.slot] += seed;

  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    const Node& nd = *it;
    switch (nd.op) {
      case Op::Add: {
        const double g = adj_[nd.out];
        adj_[nd.a] += g;
        adj_[nd.b] += g;
        break;
      }
      case Op::Sub: {
        const double g = adj_[nd.out];
        adj_[nd.a] += g;
        adj_[nd.b] -= g;
        break;
      }
      case Op::Mul: {
        const double g = adj_[nd.out];
        adj_[nd.a] += g * val_[nd.b];
        adj_[nd.b] += g * val_[nd.a];
        break;
      }
      case Op::Square: {
        adj_[nd.a] += 2.0 * val_[nd.a] * adj_[nd.out];
        break;
      }
      case Op::AffC: {
        adj_[nd.a] += nd.c0 * adj_[nd.out];
        break;
      }
      case Op::LinComb2: {
        const double g = adj_[nd.out];
        adj_[nd.a] += nd.c0 * g;
        adj_[nd.b] += nd.c1 * g;
        break;
      }
      case Op::SumSq: {
        const double g = adj_[nd.out];
        for (std::int32_t i = 0; i < nd.k; ++i)
          adj_[nd.a + i] += 2.0 * val_[nd.a + i] * g;
        break;
      }
      case Op::DotAux: {
        const double g = adj_[nd.out];
        for (std::int32_t i = 0; i < nd.k; ++i) adj_[nd.a + i] += aux_[nd.aux + i] * g;
        break;
      }
      case Op::DualIn: {
        const std::int32_t m = nd.m, d = nd.k;
        const double* x = &aux_[nd.aux];
        for (std::int32_t j = 0; j < m; ++j) {
          const double gy = adj_[nd.out + j];
          adj_[nd.b + j] += gy;
          const double* gT = &adj_[nd.out + m + j * d];
          for (std::int32_t k = 0; k < d; ++k)
            adj_[nd.a + j * d + k] += gy * x[k] + gT[k];
        }
        break;
      }
      case Op::DualAffine: {
        const std::int32_t rows = nd.m, k = nd.k, d = nd.d;
        const double* W = &val_[nd.a];
        const double* S = &val_[nd.c];
        const double* T = &val_[nd.c + k];
        for (std::int32_t j = 0; j < rows; ++j) {
          const double gy = adj_[nd.out + j];
          adj_[nd.b + j] += gy;
          const double* gT = &adj_[nd.out + rows + j * d];
          for (std::int32_t kk = 0; kk < k; ++kk) {
            const double wv = W[j * k + kk];
            double gw = gy * S[kk];
            adj_[nd.c + kk] += wv * gy;
            const double* ti = T + kk * d;
            double* gti = &adj_[nd.c + k + kk * d];
            for (std::int32_t dd = 0; dd < d; ++dd) {
              gw += gT[dd] * ti[dd];
              gti[dd] += wv * gT[dd];
            }
            adj_[nd.a + j * k + kk] += gw;
          }
        }
        break;
      }
      case Op::DualTanh: {
        const std::int32_t m = nd.m, d = nd.d;
        for (std::int32_t j = 0; j < m; ++j) {
          const double y = val_[nd.out + j];
          const double sp = 1.0 - y * y;
          const double gy = adj_[nd.out + j];
          double tacc = 0.0;
          for (std::int32_t dd = 0; dd < d; ++dd) {
            const double gt = adj_[nd.out + m + j * d + dd];
            adj_[nd.a + m + j * d + dd] += sp * gt;
            tacc += gt * val_[nd.a + m + j * d + dd];
          }
          adj_[nd.a + j] += sp * (gy - 2.0 * y * tacc);
        }
        break;
      }
      case Op::DualAdd: {
        const std::int32_t n = nd.m + nd.m * nd.d;
        for (std::int32_t i = 0; i < n; ++i) {
          const double g = adj_[nd.out + i];
          adj_[nd.a + i] += g;
          adj_[nd.b + i] += g;
        }
        break;
      }
      case Op::ValIn: {
        const std::int32_t m = nd.m, d = nd.k;
        const double* x = &aux_[nd.aux];
        for (std::int32_t j = 0; j < m; ++j) {
          const double gy = adj_[nd.out + j];
          adj_[nd.b + j] += gy;
          for (std::int32_t k = 0; k < d; ++k) adj_[nd.a + j * d + k] += gy * x[k];
        }
        break;
      }
      case Op::ValAffine: {
        const std::int32_t rows = nd.m, k = nd.k;
        for (std::int32_t j = 0; j < rows; ++j) {
          const double gy = adj_[nd.out + j];
          adj_[nd.b + j] += gy;
          for (std::int32_t kk = 0; kk < k; ++kk) {
            adj_[nd.a + j * k + kk] += gy * val_[nd.c + kk];
            adj_[nd.c + kk] += val_[nd.a + j * k + kk] * gy;
          }
        }
        break;
      }
      case Op::ValTanh: {
        for (std::int32_t j = 0; j < nd.m; ++j) {
          const double y = val_[nd.out + j];
          adj_[nd.a + j] += (1.0 - y * y) * adj_[nd.out + j];
        }
        break;
      }
      case Op::ValAdd: {
        for (std::int32_t j = 0; j < nd.m; ++j) {
          const double g = adj_[nd.out + j];
          adj_[nd.a + j] += g;
          adj_[nd.b + j] += g;
        }
        break;
      }
    }
  }
}

// ------------------------------------------------- network recording

TapeDual record_dual(Tape& tape, const TapeNetwork& net, std::span<const double> x) {
  const ParamLayout lay(net.arch);
  if (static_cast<int>(x.size()) != lay.d)
    throw std::invalid_argument("record_dual: input dimension mismatch");
  const std::int32_t off = net.param_offset;
  auto W = [&](std::size_t o, std::int32_t len) {
    return tape.leaf_slice(off + static_cast<std::int32_t>(o), len);
  };
  const std::int32_t m = lay.m, d = lay.d;

  Tape::DualVec s = tape.dual_input(W(lay.w_in(), m * d), W(lay.b_in(), m), x);
  for (int i = 0; i < lay.n; ++i) {
    Tape::DualVec t = tape.dual_tanh(
        tape.dual_affine(W(lay.block_w(i, 0), m * m), W(lay.block_b(i, 0), m), s, m));
    Tape::DualVec u = tape.dual_tanh(
        tape.dual_affine(W(lay.block_w(i, 1), m * m), W(lay.block_b(i, 1), m), t, m));
    s = tape.dual_add(s, u);
  }
  Tape::DualVec out =
      tape.dual_affine(W(lay.w_out(), m), W(lay.b_out(), 1), s, 1);
  return TapeDual{TScalar{&tape, out.base}, TSlice{out.base + 1, d}};
}

TScalar record_value(Tape& tape, const TapeNetwork& net, std::span<const double> x) {
  const ParamLayout lay(net.arch);
  if (static_cast<int>(x.size()) != lay.d)
    throw std::invalid_argument("record_value: input dimension mismatch");
  const std::int32_t off = net.param_offset;
  auto W = [&](std::size_t o, std::int32_t len) {
    return tape.leaf_slice(off + static_cast<std::int32_t>(o), len);
  };
  const std::int32_t m = lay.m, d = lay.d;

  TSlice s = tape.value_input(W(lay.w_in(), m * d), W(lay.b_in(), m), x);
  for (int i = 0; i < lay.n; ++i) {
    TSlice t = tape.value_tanh(
        tape.value_affine(W(lay.block_w(i, 0), m * m), W(lay.block_b(i, 0), m), s, m));
    TSlice u = tape.value_tanh(
        tape.value_affine(W(lay.block_w(i, 1), m * m), W(lay.block_b(i, 1), m), t, m));
    s = tape.value_add(s, u);
  }
  TSlice out = tape.value_affine(W(lay.w_out(), m), W(lay.b_out(), 1), s, 1);
  return TScalar{&tape, out.base};
}

std::pair<double, GradientVector> loss_gradient(const TermLoss& loss,
                                                std::span<const double> params) {
  Tape tape;
  tape.reset(params);
  double total = 0.0;
  const std::size_t n = loss.term_count();
  for (std::size_t k = 0; k < n; ++k) {
    tape.rewind();
    const TScalar v = loss.record_term(tape, k);
    const double w = loss.term_weight(k);
    total += w * tape.value(v);
    tape.backward(v, w);
  }
  if (!std::isfinite(total))
    throw std::runtime_error("loss_gradient: non-finite loss value");
  GradientVector grad(tape.leaf_adjoints().begin(), tape.leaf_adjoints().end());
  for (double g : grad)
    if (!std::isfinite(g))
      throw std::runtime_error("loss_gradient: non-finite gradient entry");
  return {total, std::move(grad)};
}

GradientVector finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> params, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite differences require step > 0");
  std::vector<double> p(params.begin(), params.end());
  GradientVector grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + step;
    const double fp = f(p);
    p[i] = saved - step;
    const double fm = f(p);
    p[i] = saved;
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

}  // namespace dunm
