#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ccp/errors.hpp"
#include "ccp/milp.hpp"
#include "ccp/rng.hpp"
#include "ccp/types.hpp"

namespace ccp {

enum class LayerVariant { gmi, log };

inline const char* to_string(LayerVariant v) { return v == LayerVariant::gmi ? "gmi" : "log"; }

/// Fractional parts of the offsets are kept away from the integers before any
/// division; a clamped offset is still a member of the same function family.
constexpr double kFracClampEps = 1e-6;

/// One generalized Gomory mixed-integer round,
///   phi(y) = min({W y}/{v}, (1 - {W y})/(1 - {v})) + max(-W/{v}, W/(1 - {v})) y,
/// elementwise per row, applied column-wise to matrices. The classical cuts
/// are the special case W = B^-1, v = B^-1 b for an optimal basis B. A zero
/// row with v = 0.5 evaluates to the inert inequality 0 >= 0 and is used as
/// padding so layer widths stay fixed.
struct GmiLayer {
  Matrix W;  // width x indim
  Vector v;  // width
  LayerVariant variant = LayerVariant::gmi;

  int width() const { return int(W.rows()); }
  int indim() const { return int(W.cols()); }

  void validate() const {
    if (width() < 1) throw ValidationError("GmiLayer: width must be >= 1");
    if (v.size() != width()) throw ValidationError("GmiLayer: v length does not match width");
    if (!W.allFinite() || !v.allFinite()) throw ValidationError("GmiLayer: non-finite entry");
  }

  static GmiLayer dummy(int width, int indim, LayerVariant variant = LayerVariant::gmi) {
    return {Matrix::Zero(width, indim), Vector::Constant(width, 0.5), variant};
  }
};

/// K stacked rounds. Layer k maps p_{k-1} -> p_k = p_{k-1} + width_k through
/// the lift y -> [y, phi(y)], so the first input_dim outputs of the whole
/// network are the identity.
struct SubadditiveNet {
  int input_dim = 0;
  std::vector<GmiLayer> layers;

  int output_dim() const {
    int p = input_dim;
    for (const auto& l : layers) p += l.width();
    return p;
  }

  void validate() const {
    if (input_dim < 1) throw ValidationError("SubadditiveNet: input_dim must be >= 1");
    int dim = input_dim;
    for (const auto& l : layers) {
      l.validate();
      if (l.indim() != dim) throw ValidationError("SubadditiveNet: layer input dimension mismatch");
      dim += l.width();
    }
  }
};

/// Per-layer quantities that depend on (W, v) only: clamped fractional
/// offsets, their clamp indicator, and the linear coefficient matrix
/// C = max(-W/{v}, W/(1-{v})) with its active branch.
struct LayerStatic {
  Vector fv;       // clamped frac(v)
  Vector dfv;      // 1 where the clamp is inactive, else 0
  Matrix C;        // width x indim
  BoolArray cmask; // true where the first branch -W/{v} is active
};

inline LayerStatic make_layer_static(const GmiLayer& layer) {
  const int w = layer.width(), d = layer.indim();
  LayerStatic s;
  s.fv.resize(w);
  s.dfv.resize(w);
  s.C.resize(w, d);
  s.cmask.resize(w, d);
  for (int i = 0; i < w; ++i) {
    const double raw = frac(layer.v(i));
    const double cl = std::clamp(raw, kFracClampEps, 1.0 - kFracClampEps);
    s.fv(i) = cl;
    s.dfv(i) = (raw == cl) ? 1.0 : 0.0;
    for (int j = 0; j < d; ++j) {
      const double a = -layer.W(i, j) / cl;
      const double b = layer.W(i, j) / (1.0 - cl);
      const bool first = a >= b;  // ties take the first branch
      s.cmask(i, j) = first;
      s.C(i, j) = first ? a : b;
    }
  }
  return s;
}

/// Branch bookkeeping for one evaluated chain of columns. `first_branch`
/// records, per output scalar, whether the first argument of the min (phi
/// chains) or max (UDDZ chains) was taken; gradients replay those choices.
struct ChainTrace {
  std::vector<Matrix> input;          // per layer, p_{k-1} x t
  std::vector<Matrix> u;              // per layer, W * input
  std::vector<BoolArray> first_branch;
  std::vector<Matrix> raw;            // pre-log phi values (log variant only)
};

struct ForwardCache {
  std::vector<LayerStatic> layer_static;
  ChainTrace ab;  // columns of [A, b] through the phi chain
  ChainTrace g;   // columns of G through the UDDZ chain
};

namespace detail {

inline Matrix eval_phi(const GmiLayer& layer, const LayerStatic& s, const Matrix& Y, Matrix* u_out,
                       BoolArray* mask_out, Matrix* raw_out) {
  const int w = layer.width();
  const int t = int(Y.cols());
  Matrix U = layer.W * Y;
  Matrix out = s.C * Y;
  BoolArray mask(w, t);
  for (int j = 0; j < t; ++j) {
    for (int i = 0; i < w; ++i) {
      const double fu = frac(U(i, j));
      const double a = fu / s.fv(i);
      const double b = (1.0 - fu) / (1.0 - s.fv(i));
      const bool first = a <= b;
      mask(i, j) = first;
      out(i, j) += first ? a : b;
    }
  }
  if (layer.variant == LayerVariant::log) {
    if (raw_out) *raw_out = out;
    for (int j = 0; j < t; ++j)
      for (int i = 0; i < w; ++i) {
        if (out(i, j) <= -1.0 + 1e-12)
          throw DomainError("log layer: phi value " + std::to_string(out(i, j)) + " outside (-1, inf)");
        out(i, j) = std::log1p(out(i, j));
      }
  }
  if (u_out) *u_out = std::move(U);
  if (mask_out) *mask_out = std::move(mask);
  return out;
}

// The upper directional derivative at zero shares the linear term with phi
// and replaces the periodic part by its sublinear envelope. For the log
// variant it coincides with the base variant, log(1+t) having unit slope at
// the origin.
inline Matrix eval_phi_bar(const GmiLayer& layer, const LayerStatic& s, const Matrix& Y, Matrix* u_out,
                           BoolArray* mask_out) {
  const int w = layer.width();
  const int t = int(Y.cols());
  Matrix U = layer.W * Y;
  Matrix out = s.C * Y;
  BoolArray mask(w, t);
  for (int j = 0; j < t; ++j) {
    for (int i = 0; i < w; ++i) {
      const double a = U(i, j) / s.fv(i);
      const double b = -U(i, j) / (1.0 - s.fv(i));
      const bool first = a >= b;
      mask(i, j) = first;
      out(i, j) += first ? a : b;
    }
  }
  if (u_out) *u_out = std::move(U);
  if (mask_out) *mask_out = std::move(mask);
  return out;
}

inline Matrix vstack(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

}  // namespace detail

/// Evaluates one layer on a matrix of columns.
inline Matrix layer_phi(const GmiLayer& layer, const Matrix& Y) {
  layer.validate();
  if (Y.rows() != layer.indim()) throw ValidationError("layer_phi: input dimension mismatch");
  const LayerStatic s = make_layer_static(layer);
  return detail::eval_phi(layer, s, Y, nullptr, nullptr, nullptr);
}

inline Matrix layer_phi_bar(const GmiLayer& layer, const Matrix& Y) {
  layer.validate();
  if (Y.rows() != layer.indim()) throw ValidationError("layer_phi_bar: input dimension mismatch");
  const LayerStatic s = make_layer_static(layer);
  return detail::eval_phi_bar(layer, s, Y, nullptr, nullptr);
}

struct NetForward {
  Matrix FA;  // p x k
  Matrix FG;  // p x (n - k)
  Vector fb;  // p
};

/// Runs the integer columns and the right-hand side through the lifted phi
/// chain and the continuous columns through the lifted UDDZ chain. The first
/// input_dim rows of each output reproduce the inputs verbatim.
inline NetForward net_forward(const SubadditiveNet& net, const Matrix& A, const Matrix& G, const Vector& b,
                              ForwardCache* cache = nullptr) {
  net.validate();
  const int m = net.input_dim;
  if (A.rows() != m || G.rows() != m || b.size() != m)
    throw ValidationError("net_forward: input row count does not match net input_dim");
  const int k = int(A.cols());
  const int nc = int(G.cols());

  Matrix X(m, k + 1);
  if (k > 0) X << A, b;
  else X = b;
  Matrix Z = G;

  for (const auto& layer : net.layers) {
    const LayerStatic s = make_layer_static(layer);
    Matrix u, raw;
    BoolArray mask;
    if (cache) cache->ab.input.push_back(X);
    Matrix phi = detail::eval_phi(layer, s, X, cache ? &u : nullptr, cache ? &mask : nullptr,
                                  cache ? &raw : nullptr);
    if (cache) {
      cache->ab.u.push_back(std::move(u));
      cache->ab.first_branch.push_back(std::move(mask));
      cache->ab.raw.push_back(std::move(raw));
    }
    X = detail::vstack(X, phi);

    if (nc > 0) {
      Matrix ug;
      BoolArray maskg;
      if (cache) cache->g.input.push_back(Z);
      Matrix phibar = detail::eval_phi_bar(layer, s, Z, cache ? &ug : nullptr, cache ? &maskg : nullptr);
      if (cache) {
        cache->g.u.push_back(std::move(ug));
        cache->g.first_branch.push_back(std::move(maskg));
      }
      Z = detail::vstack(Z, phibar);
    } else {
      Z = Matrix::Zero(Z.rows() + layer.width(), 0);
    }
    if (cache) cache->layer_static.push_back(s);
  }

  NetForward out;
  out.FA = X.leftCols(k);
  out.fb = X.col(k);
  out.FG = Z;
  return out;
}

/// Per-layer gradients of the cut-off loss.
struct GradientSet {
  struct LayerGrad {
    Matrix dW;
    Vector dv;
  };
  std::vector<LayerGrad> layers;

  bool all_finite() const {
    for (const auto& l : layers)
      if (!l.dW.allFinite() || !l.dv.allFinite()) return false;
    return true;
  }
};

struct LossResult {
  double loss = 0.0;
  Vector violation;  // FA xbar + FG zbar - fb; entry < 0 means that row cuts the point
  NetForward fwd;
  ForwardCache cache;
};

/// Mean signed slack of the generated inequalities at a target point. Driving
/// the mean down pushes rows toward cutting the point off; the identity rows
/// contribute constants.
inline LossResult cutoff_loss(const SubadditiveNet& net, const MilpInstance& inst, const Vector& xbar,
                              const Vector& zbar) {
  if (xbar.size() != inst.k || zbar.size() != inst.ncont())
    throw ValidationError("cutoff_loss: target point dimensions do not match the instance");
  LossResult res;
  res.fwd = net_forward(net, inst.A, inst.G, inst.b, &res.cache);
  res.violation = res.fwd.FA * xbar - res.fwd.fb;
  if (inst.ncont() > 0) res.violation += res.fwd.FG * zbar;
  res.loss = res.violation.mean();
  return res;
}

/// Reverse accumulation through the recorded branch choices. Fractional parts
/// differentiate with slope one; each min/max differentiates through its
/// active branch, ties having been resolved toward the first argument.
inline GradientSet loss_gradients(const SubadditiveNet& net, const MilpInstance& inst, const Vector& xbar,
                                  const Vector& zbar, const ForwardCache& cache) {
  const int K = int(net.layers.size());
  const int p = net.output_dim();
  GradientSet grads;
  grads.layers.resize(K);
  for (int k = 0; k < K; ++k) {
    grads.layers[k].dW = Matrix::Zero(net.layers[k].width(), net.layers[k].indim());
    grads.layers[k].dv = Vector::Zero(net.layers[k].width());
  }
  if (K == 0) return grads;

  // Output cotangents: column j of [A, b] enters the loss with weight
  // xbar_j / p (and -1/p for b); column j of G with weight zbar_j / p.
  const auto backprop_chain = [&](const ChainTrace& trace, const Vector& weights, bool uddz) {
    const int t = int(weights.size());
    if (t == 0) return;
    Matrix cot = Vector::Ones(p) * weights.transpose();  // p x t
    for (int k = K - 1; k >= 0; --k) {
      const GmiLayer& layer = net.layers[k];
      const LayerStatic& s = cache.layer_static[k];
      const int w = layer.width();
      const int pin = layer.indim();
      const Matrix& Y = trace.input[k];
      const Matrix& U = trace.u[k];
      const BoolArray& mask = trace.first_branch[k];

      Matrix gphi = cot.bottomRows(w);
      if (!uddz && layer.variant == LayerVariant::log)
        gphi.array() /= 1.0 + trace.raw[k].array();

      Matrix du(w, t);
      Vector dv_acc = Vector::Zero(w);
      for (int j = 0; j < t; ++j) {
        for (int i = 0; i < w; ++i) {
          const double g = gphi(i, j);
          const double fv = s.fv(i);
          if (mask(i, j)) {
            du(i, j) = g / fv;
            dv_acc(i) += uddz ? g * (-U(i, j) / (fv * fv))
                             : g * (-frac(U(i, j)) / (fv * fv));
          } else {
            du(i, j) = -g / (1.0 - fv);
            dv_acc(i) += uddz ? g * (-U(i, j) / ((1.0 - fv) * (1.0 - fv)))
                             : g * ((1.0 - frac(U(i, j))) / ((1.0 - fv) * (1.0 - fv)));
          }
        }
      }

      const Matrix R = gphi * Y.transpose();  // w x pin, shared by the C paths
      Matrix dW_layer = du * Y.transpose();
      for (int i = 0; i < w; ++i) {
        const double fv = s.fv(i);
        for (int j2 = 0; j2 < pin; ++j2) {
          if (s.cmask(i, j2)) {
            dW_layer(i, j2) += R(i, j2) * (-1.0 / fv);
            dv_acc(i) += R(i, j2) * (layer.W(i, j2) / (fv * fv));
          } else {
            dW_layer(i, j2) += R(i, j2) * (1.0 / (1.0 - fv));
            dv_acc(i) += R(i, j2) * (layer.W(i, j2) / ((1.0 - fv) * (1.0 - fv)));
          }
        }
      }

      grads.layers[k].dW += dW_layer;
      grads.layers[k].dv += dv_acc.cwiseProduct(s.dfv);
      cot = Matrix(cot.topRows(pin) + layer.W.transpose() * du + s.C.transpose() * gphi);
    }
  };

  Vector ab_weights(inst.k + 1);
  ab_weights.head(inst.k) = xbar / double(p);
  ab_weights(inst.k) = -1.0 / double(p);
  backprop_chain(cache.ab, ab_weights, false);
  if (inst.ncont() > 0) backprop_chain(cache.g, zbar / double(p), true);
  return grads;
}

/// One plain gradient step; the input net is left untouched.
inline SubadditiveNet sgd_step(const SubadditiveNet& net, const GradientSet& grads, double alpha) {
  if (grads.layers.size() != net.layers.size())
    throw ValidationError("sgd_step: gradient shape does not match the net");
  SubadditiveNet out = net;
  for (size_t k = 0; k < out.layers.size(); ++k) {
    out.layers[k].W -= alpha * grads.layers[k].dW;
    out.layers[k].v -= alpha * grads.layers[k].dv;
  }
  return out;
}

namespace detail {

// Clamp so that frac(v) stays inside [eps, 1-eps].
inline double clamp_offset(double v) {
  const double f = frac(v);
  if (f < kFracClampEps) return std::floor(v) + kFracClampEps;
  if (f > 1.0 - kFracClampEps) return std::floor(v) + 1.0 - kFracClampEps;
  return v;
}

}  // namespace detail

/// Random initializer: rows of each W are mutually orthogonal unit vectors
/// within blocks of indim rows (more rows than dimensions cannot all be
/// orthogonal); offsets are standard normal draws.
inline SubadditiveNet random_orthogonal_init(int m, const std::vector<int>& widths, std::uint64_t seed,
                                             LayerVariant variant = LayerVariant::gmi) {
  if (widths.empty()) throw ValidationError("random_orthogonal_init: widths must be nonempty");
  Rng rng(seed);
  SubadditiveNet net;
  net.input_dim = m;
  int indim = m;
  for (const int width : widths) {
    if (width < 1) throw ValidationError("random_orthogonal_init: widths must be >= 1");
    Matrix W(width, indim);
    int row = 0;
    while (row < width) {
      const int block = std::min(indim, width - row);
      for (int i = 0; i < block; ++i) {
        for (;;) {
          Vector cand = rng.gaussian_vector(indim);
          // modified Gram-Schmidt, two passes
          for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < i; ++j) cand -= cand.dot(W.row(row + j)) * W.row(row + j).transpose();
          const double nrm = cand.norm();
          if (nrm > 1e-8) {
            W.row(row + i) = cand.transpose() / nrm;
            break;
          }
        }
      }
      row += block;
    }
    Vector v(width);
    for (int i = 0; i < width; ++i) v(i) = detail::clamp_offset(rng.gaussian());
    net.layers.push_back({std::move(W), std::move(v), variant});
    indim += width;
  }
  net.validate();
  return net;
}

}  // namespace ccp
