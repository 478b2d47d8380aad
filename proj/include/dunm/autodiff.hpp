#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dunm/network.hpp"

namespace dunm {

// Value of a scalar field at a point together with its exact spatial gradient.
struct DualPoint {
  double value = 0.0;
  std::vector<double> tangent;  // length d
};

using GradientVector = std::vector<double>;

// Gradient-augmented forward pass: propagates (value, spatial tangent) pairs
// through every layer, so the returned tangent is the exact gradient of the
// network at x, not a finite-difference estimate.
DualPoint value_and_spatial_gradient(const NetworkArch& arch,
                                     std::span<const double> params,
                                     std::span<const double> x);

// value only, writing into caller scratch; returns the value
double forward_value(const NetworkArch& arch, std::span<const double> params,
                     std::span<const double> x, std::vector<double>& scratch);

class Tape;

// Handle to one scalar slot on a tape. Carries the tape pointer so loss
// formulas can be written once, generic over double / TScalar.
struct TScalar {
  Tape* tape = nullptr;
  std::int32_t slot = -1;
};

// Handle to a contiguous range of slots (a vector quantity on the tape).
struct TSlice {
  std::int32_t base = -1;
  std::int32_t len = 0;
};

// Reverse-mode tape over a fixed block of leaf parameters. The primitives are
// the operations the discrete energy is built from: affine layers, tanh,
// products, squares, and small linear combinations. Layer operations record
// one node each and run dense loops in both passes, so gradients cost a small
// multiple of the forward evaluation.
//
// The spatial-gradient terms of the energy are handled by recording the
// gradient-augmented forward pass as the primal computation: a "dual vector"
// on the tape is a width-m value vector followed by its m x d tangent matrix,
// and the reverse sweep therefore yields exact mixed derivatives
// d/dtheta of grad_x u.
//
// Tapes are single-use per recording (rewind between terms) and must not be
// shared between concurrent evaluations. Leaf adjoints accumulate across
// backward() calls until zero_leaf_adjoints(); replaying terms in index order
// gives a deterministic ordered reduction.
class Tape {
 public:
  struct DualVec {
    std::int32_t base = -1;  // m values, then m*d tangents, contiguous
    std::int32_t width = 0;
    std::int32_t dim = 0;
  };

  void reset(std::span<const double> leaf_params);
  void rewind();  // drop intermediates, keep leaves and their adjoints
  std::int32_t leaf_count() const { return n_leaf_; }

  TScalar leaf(std::int32_t i);
  TSlice leaf_slice(std::int32_t offset, std::int32_t len) const;
  TScalar constant(double v);

  TScalar add(TScalar a, TScalar b);
  TScalar sub(TScalar a, TScalar b);
  TScalar mul(TScalar a, TScalar b);
  TScalar square(TScalar a);
  TScalar affine(TScalar a, double scale, double shift);
  TScalar lincomb(TScalar a, TScalar b, double ca, double cb);
  TScalar sumsq(TSlice v);
  TScalar dot(TSlice v, std::span<const double> weights);

  DualVec dual_input(TSlice w, TSlice b, std::span<const double> x);
  DualVec dual_affine(TSlice w, TSlice b, DualVec in, std::int32_t rows);
  DualVec dual_tanh(DualVec in);
  DualVec dual_add(DualVec a, DualVec b);

  TSlice value_input(TSlice w, TSlice b, std::span<const double> x);
  TSlice value_affine(TSlice w, TSlice b, TSlice in, std::int32_t rows);
  TSlice value_tanh(TSlice in);
  TSlice value_add(TSlice a, TSlice b);

  double value(TScalar v) const { return val_[v.slot]; }
  double value_at(std::int32_t slot) const { return val_[slot]; }

  // Accumulates seed * d(root)/d(leaf) into the leaf adjoints.
  void backward(TScalar root, double seed = 1.0);

  std::span<const double> leaf_adjoints() const {
    return {adj_.data(), static_cast<std::size_t>(n_leaf_)};
  }
  void zero_leaf_adjoints();

 private:
  enum class Op : std::uint8_t {
    Add, Sub, Mul, Square, AffC, LinComb2, SumSq, DotAux,
    DualIn, DualAffine, DualTanh, DualAdd,
    ValIn, ValAffine, ValTanh, ValAdd,
  };

  struct Node {
    Op op;
    std::int32_t out = -1, a = -1, b = -1, c = -1;
    std::int32_t m = 0, k = 0, d = 0, aux = -1;
    double c0 = 0.0, c1 = 0.0;
  };

  std::int32_t alloc(std::int32_t n);
  std::int32_t push_aux(std::span<const double> data);
  TScalar out_scalar(std::int32_t slot) { return TScalar{this, slot}; }

  std::vector<double> val_, adj_, aux_;
  std::vector<Node> nodes_;
  std::int32_t n_leaf_ = 0;
  std::int32_t top_ = 0;
};

// --- operator sugar so energy formulas read the same for double and TScalar
inline TScalar operator+(TScalar a, TScalar b) { return a.tape->add(a, b); }
inline TScalar operator-(TScalar a, TScalar b) { return a.tape->sub(a, b); }
inline TScalar operator*(TScalar a, TScalar b) { return a.tape->mul(a, b); }
inline TScalar operator*(double c, TScalar a) { return a.tape->affine(a, c, 0.0); }
inline TScalar operator*(TScalar a, double c) { return a.tape->affine(a, c, 0.0); }
inline TScalar operator+(TScalar a, double c) { return a.tape->affine(a, 1.0, c); }
inline TScalar operator+(double c, TScalar a) { return a.tape->affine(a, 1.0, c); }
inline TScalar operator-(TScalar a, double c) { return a.tape->affine(a, 1.0, -c); }
inline TScalar operator-(double c, TScalar a) { return a.tape->affine(a, -1.0, c); }
inline TScalar operator-(TScalar a) { return a.tape->affine(a, -1.0, 0.0); }
inline TScalar square(TScalar a) { return a.tape->square(a); }
inline double square(double x) { return x * x; }

// Records the gradient-augmented pass of a network whose parameters live in
// the tape leaf block starting at param_offset.
struct TapeNetwork {
  NetworkArch arch;
  std::int32_t param_offset = 0;
};

struct TapeDual {
  TScalar value;
  TSlice gradient;  // d slots
};

TapeDual record_dual(Tape& tape, const TapeNetwork& net, std::span<const double> x);
TScalar record_value(Tape& tape, const TapeNetwork& net, std::span<const double> x);

// A batch loss presented as an ordered sum of weighted scalar terms, each
// recordable on a tape. loss_gradient replays the terms in index order on a
// single-use tape per term and accumulates the exact gradient.
class TermLoss {
 public:
  virtual ~TermLoss() = default;
  virtual std::size_t term_count() const = 0;
  virtual double term_weight(std::size_t) const { return 1.0; }
  virtual TScalar record_term(Tape& tape, std::size_t k) const = 0;
};

// Wraps a single closure as a one-term loss (toy losses, tests).
class SingleTermLoss final : public TermLoss {
 public:
  explicit SingleTermLoss(std::function<TScalar(Tape&)> fn) : fn_(std::move(fn)) {}
  std::size_t term_count() const override { return 1; }
  TScalar record_term(Tape& tape, std::size_t) const override { return fn_(tape); }

 private:
  std::function<TScalar(Tape&)> fn_;
};

// Returns (loss value, exact gradient w.r.t. every leaf parameter). Throws on
// non-finite results. Deterministic: fixed term order, fixed reduction order.
std::pair<double, GradientVector> loss_gradient(const TermLoss& loss,
                                                std::span<const double> params);

// Central differences (f(p+h e_i) - f(p-h e_i)) / (2h); the test oracle.
GradientVector finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> params, double step);

}  // namespace dunm
