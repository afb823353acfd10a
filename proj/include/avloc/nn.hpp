#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "avloc/errors.hpp"
#include "avloc/rng.hpp"

namespace avloc {

enum class Activation { Identity, Relu, Sigmoid };

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Sigmoid:
      // numerically stable in both tails
      if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
      } else {
        const double e = std::exp(x);
        return e / (1.0 + e);
      }
  }
  return x;
}

/// Derivative of the activation expressed through its own output value.
inline double activation_grad(Activation a, double out) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Relu: return out > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: return out * (1.0 - out);
  }
  return 1.0;
}

/// Glorot (uniform) initialization: samples in [-L, L] with
/// L = sqrt(6 / (fan_in + fan_out)).
inline std::vector<double> glorot_init(int fan_in, int fan_out, std::size_t count, Rng& rng) {
  if (fan_in <= 0 || fan_out <= 0) {
    throw UsageError("glorot_init requires positive fan_in and fan_out");
  }
  const double limit = std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out));
  std::vector<double> out(count);
  for (double& v : out) {
    v = limit * (2.0 * rng.uniform() - 1.0);
  }
  return out;
}

inline double glorot_limit(int fan_in, int fan_out) {
  return std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out));
}

/// Flat, ordered storage for all trainable parameters and a shape-congruent
/// gradient buffer. Layers allocate named groups at construction time; the
/// declaration order fixes the checkpoint layout.
class ParamStore {
 public:
  struct Group {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
  };

  std::size_t allocate(std::string name, std::size_t n) {
    const std::size_t off = values_.size();
    values_.resize(off + n, 0.0);
    grads_.resize(off + n, 0.0);
    groups_.push_back({std::move(name), off, n});
    return off;
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<Group>& groups() const { return groups_; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> grads() { return grads_; }
  std::span<const double> grads() const { return grads_; }

  std::span<double> values(std::size_t offset, std::size_t n) {
    return std::span<double>(values_).subspan(offset, n);
  }
  std::span<const double> values(std::size_t offset, std::size_t n) const {
    return std::span<const double>(values_).subspan(offset, n);
  }

  void zero_grads() { std::fill(grads_.begin(), grads_.end(), 0.0); }

 private:
  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<Group> groups_;
};

/// Fully connected layer, y = act(W x + b). W is stored row-major (out x in).
class Dense {
 public:
  Dense(ParamStore& ps, const std::string& name, int in, int out, Activation act)
      : in_(in), out_(out), act_(act) {
    if (in < 1 || out < 1) throw UsageError("dense layer dims must be positive");
    w_off_ = ps.allocate(name + ".w", static_cast<std::size_t>(in) * out);
    b_off_ = ps.allocate(name + ".b", static_cast<std::size_t>(out));
  }

  void init(ParamStore& ps, Rng& rng) const {
    auto w = glorot_init(in_, out_, static_cast<std::size_t>(in_) * out_, rng);
    auto dst = ps.values(w_off_, w.size());
    std::copy(w.begin(), w.end(), dst.begin());
    auto b = ps.values(b_off_, static_cast<std::size_t>(out_));
    std::fill(b.begin(), b.end(), 0.0);
  }

  void forward(const ParamStore& ps, std::span<const double> x, std::vector<double>& out) const {
    const auto w = ps.values(w_off_, static_cast<std::size_t>(in_) * out_);
    const auto b = ps.values(b_off_, static_cast<std::size_t>(out_));
    out.resize(static_cast<std::size_t>(out_));
    for (int k = 0; k < out_; ++k) {
      const double* wk = w.data() + static_cast<std::size_t>(k) * in_;
      double acc = b[k];
      for (int i = 0; i < in_; ++i) acc += wk[i] * x[i];
      out[k] = activate(act_, acc);
    }
  }

  /// Accumulates parameter gradients into grad_buf and writes the gradient
  /// with respect to the input into dx. `out` must be this layer's forward
  /// output for the same x.
  void backward(const ParamStore& ps, std::span<const double> x, std::span<const double> out,
                std::span<const double> dout, std::span<double> grad_buf,
                std::vector<double>& dx) const {
    const auto w = ps.values(w_off_, static_cast<std::size_t>(in_) * out_);
    dx.assign(static_cast<std::size_t>(in_), 0.0);
    double* dw = grad_buf.data() + w_off_;
    double* db = grad_buf.data() + b_off_;
    for (int k = 0; k < out_; ++k) {
      const double dpre = dout[k] * activation_grad(act_, out[k]);
      if (dpre == 0.0) continue;
      const double* wk = w.data() + static_cast<std::size_t>(k) * in_;
      double* dwk = dw + static_cast<std::size_t>(k) * in_;
      db[k] += dpre;
      for (int i = 0; i < in_; ++i) {
        dwk[i] += dpre * x[i];
        dx[i] += dpre * wk[i];
      }
    }
  }

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  Activation activation() const { return act_; }

 private:
  int in_;
  int out_;
  Activation act_;
  std::size_t w_off_ = 0;
  std::size_t b_off_ = 0;
};

/// 3x3 convolution with unit-stride zero padding, so the spatial output size
/// equals the input size. Feature maps are stored channel-major:
/// value(ch, r, c) = data[(ch * rows + r) * cols + c].
class Conv3x3 {
 public:
  Conv3x3(ParamStore& ps, const std::string& name, int rows, int cols, int in_ch, int out_ch,
          Activation act)
      : rows_(rows), cols_(cols), in_ch_(in_ch), out_ch_(out_ch), act_(act) {
    if (rows < 1 || cols < 1 || in_ch < 1 || out_ch < 1) {
      throw UsageError("conv layer dims must be positive");
    }
    k_off_ = ps.allocate(name + ".k", static_cast<std::size_t>(out_ch) * in_ch * 9);
    b_off_ = ps.allocate(name + ".b", static_cast<std::size_t>(out_ch));
  }

  void init(ParamStore& ps, Rng& rng) const {
    auto k = glorot_init(in_ch_ * 9, out_ch_ * 9, static_cast<std::size_t>(out_ch_) * in_ch_ * 9,
                         rng);
    auto dst = ps.values(k_off_, k.size());
    std::copy(k.begin(), k.end(), dst.begin());
    auto b = ps.values(b_off_, static_cast<std::size_t>(out_ch_));
    std::fill(b.begin(), b.end(), 0.0);
  }

  void forward(const ParamStore& ps, std::span<const double> in, std::vector<double>& out) const {
    const auto k = ps.values(k_off_, static_cast<std::size_t>(out_ch_) * in_ch_ * 9);
    const auto b = ps.values(b_off_, static_cast<std::size_t>(out_ch_));
    const std::size_t plane = static_cast<std::size_t>(rows_) * cols_;
    out.assign(static_cast<std::size_t>(out_ch_) * plane, 0.0);
    for (int oc = 0; oc < out_ch_; ++oc) {
      double* op = out.data() + static_cast<std::size_t>(oc) * plane;
      for (std::size_t p = 0; p < plane; ++p) op[p] = b[oc];
      for (int ic = 0; ic < in_ch_; ++ic) {
        const double* ip = in.data() + static_cast<std::size_t>(ic) * plane;
        const double* kk = k.data() + (static_cast<std::size_t>(oc) * in_ch_ + ic) * 9;
        for (int r = 0; r < rows_; ++r) {
          for (int c = 0; c < cols_; ++c) {
            double acc = 0.0;
            for (int dr = -1; dr <= 1; ++dr) {
              const int rr = r + dr;
              if (rr < 0 || rr >= rows_) continue;
              for (int dc = -1; dc <= 1; ++dc) {
                const int cc = c + dc;
                if (cc < 0 || cc >= cols_) continue;
                acc += kk[(dr + 1) * 3 + (dc + 1)] * ip[rr * cols_ + cc];
              }
            }
            op[r * cols_ + c] += acc;
          }
        }
      }
      for (std::size_t p = 0; p < plane; ++p) op[p] = activate(act_, op[p]);
    }
  }

  void backward(const ParamStore& ps, std::span<const double> in, std::span<const double> out,
                std::span<const double> dout, std::span<double> grad_buf,
                std::vector<double>& din) const {
    const auto k = ps.values(k_off_, static_cast<std::size_t>(out_ch_) * in_ch_ * 9);
    const std::size_t plane = static_cast<std::size_t>(rows_) * cols_;
    din.assign(static_cast<std::size_t>(in_ch_) * plane, 0.0);
    double* dk = grad_buf.data() + k_off_;
    double* db = grad_buf.data() + b_off_;

    // dpre = dout * act'(out), computed once per output cell.
    std::vector<double> dpre(static_cast<std::size_t>(out_ch_) * plane);
    for (std::size_t p = 0; p < dpre.size(); ++p) {
      dpre[p] = dout[p] * activation_grad(act_, out[p]);
    }

    for (int oc = 0; oc < out_ch_; ++oc) {
      const double* dp = dpre.data() + static_cast<std::size_t>(oc) * plane;
      for (std::size_t p = 0; p < plane; ++p) db[oc] += dp[p];
      for (int ic = 0; ic < in_ch_; ++ic) {
        const double* ip = in.data() + static_cast<std::size_t>(ic) * plane;
        double* dip = din.data() + static_cast<std::size_t>(ic) * plane;
        const double* kk = k.data() + (static_cast<std::size_t>(oc) * in_ch_ + ic) * 9;
        double* dkk = dk + (static_cast<std::size_t>(oc) * in_ch_ + ic) * 9;
        for (int r = 0; r < rows_; ++r) {
          for (int c = 0; c < cols_; ++c) {
            const double g = dp[r * cols_ + c];
            if (g == 0.0) continue;
            for (int dr = -1; dr <= 1; ++dr) {
              const int rr = r + dr;
              if (rr < 0 || rr >= rows_) continue;
              for (int dc = -1; dc <= 1; ++dc) {
                const int cc = c + dc;
                if (cc < 0 || cc >= cols_) continue;
                const int tap = (dr + 1) * 3 + (dc + 1);
                dkk[tap] += g * ip[rr * cols_ + cc];
                dip[rr * cols_ + cc] += g * kk[tap];
              }
            }
          }
        }
      }
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }

 private:
  int rows_;
  int cols_;
  int in_ch_;
  int out_ch_;
  Activation act_;
  std::size_t k_off_ = 0;
  std::size_t b_off_ = 0;
};

}  // namespace avloc
