// nn/layers.h

// Copyright 2026 The octsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef OCTSEP_NN_LAYERS_H_
#define OCTSEP_NN_LAYERS_H_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "base/error.h"
#include "nn/tensor.h"

// Layers hold parameters only. Forward passes are const and return whatever
// the matching Backward needs; callers own those caches, so one layer can take
// part in several forward passes before a single backward sweep. Backward
// accumulates into Param::grad.

namespace octsep::nn {

template <typename T>
using StridedMap = Eigen::Map<Mat<T>, 0, Eigen::OuterStride<>>;
template <typename T>
using ConstStridedMap = Eigen::Map<const Mat<T>, 0, Eigen::OuterStride<>>;

// y = W x + b, applied column-wise (a 1x1 convolution on feature maps).
template <typename T>
struct Dense {
  Param<T> w, b;

  Dense() = default;
  Dense(int in, int out) : w(out, in), b(out, 1) {}

  int in() const { return static_cast<int>(w.value.cols()); }
  int out() const { return static_cast<int>(w.value.rows()); }

  void InitUniform(Rng &rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in()));
    FillUniform(w.value, rng, bound);
    FillUniform(b.value, rng, bound);
  }

  Mat<T> Forward(const Mat<T> &x) const {
    Mat<T> y(w.value.rows(), x.cols());
    y.noalias() = w.value * x;
    y.colwise() += b.value.col(0);
    return y;
  }

  // Returns dx.
  Mat<T> Backward(const Mat<T> &x, const Mat<T> &dy) {
    w.grad.noalias() += dy * x.transpose();
    b.grad += RowSum(dy);
    Mat<T> dx(x.rows(), x.cols());
    dx.noalias() = w.value.transpose() * dy;
    return dx;
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) {
    fn(prefix + "w", w);
    fn(prefix + "b", b);
  }
};

template <typename T>
Mat<T> Relu(const Mat<T> &x) {
  return x.cwiseMax(T(0));
}

template <typename T>
Mat<T> ReluBackward(const Mat<T> &x, const Mat<T> &dy) {
  return (x.array() > T(0)).select(dy, T(0));
}

template <typename T>
Mat<T> Sigmoid(const Mat<T> &x) {
  return (T(1) / (T(1) + (-x.array()).exp())).matrix();
}

// Per-channel leaky rectifier with learned negative slope.
template <typename T>
struct PRelu {
  Param<T> slope;

  PRelu() = default;
  explicit PRelu(int channels) : slope(channels, 1) { slope.value.setConstant(T(0.25)); }

  Mat<T> Forward(const Mat<T> &x) const {
    Mat<T> y(x.rows(), x.cols());
    const auto a = slope.value.col(0).array();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      y.col(j).array() = x.col(j).array().max(T(0)) + a * x.col(j).array().min(T(0));
    return y;
  }

  Mat<T> Backward(const Mat<T> &x, const Mat<T> &dy) {
    const Mat<T> neg_part = x.cwiseMin(T(0)).cwiseProduct(dy);
    slope.grad.col(0) += RowSum(neg_part);
    Mat<T> dx(x.rows(), x.cols());
    const auto a = slope.value.col(0).array();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      dx.col(j).array() = dy.col(j).array() * (x.col(j).array() > T(0)).select(T(1), a);
    return dx;
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) { fn(prefix + "slope", slope); }
};

// Layer norm over channels, independently for every frame.
template <typename T>
struct ChannelNorm {
  Param<T> gain, bias;
  T eps = T(1e-8);

  struct Cache {
    Mat<T> xhat;
    Eigen::Matrix<T, 1, Eigen::Dynamic> inv_std;
  };

  ChannelNorm() = default;
  explicit ChannelNorm(int channels) : gain(channels, 1), bias(channels, 1) {
    gain.value.setOnes();
  }

  Mat<T> Forward(const Mat<T> &x, Cache *cache) const {
    const T n = static_cast<T>(x.rows());
    Mat<T> xhat(x.rows(), x.cols()), y(x.rows(), x.cols());
    Eigen::Matrix<T, 1, Eigen::Dynamic> inv(x.cols());
    const auto g = gain.value.col(0).array();
    const auto b = bias.value.col(0).array();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      auto xh = xhat.col(j).array();
      xh = x.col(j).array() - x.col(j).sum() / n;
      inv(j) = T(1) / std::sqrt(xh.square().sum() / n + eps);
      xh *= inv(j);
      y.col(j).array() = xh * g + b;
    }
    if (cache) {
      cache->xhat = std::move(xhat);
      cache->inv_std = std::move(inv);
    }
    return y;
  }

  Mat<T> Backward(const Cache &cache, const Mat<T> &dy) {
    const T n = static_cast<T>(dy.rows());
    Mat<T> dx(dy.rows(), dy.cols());
    Vec<T> dg = Vec<T>::Zero(dy.rows());
    const auto g = gain.value.col(0).array();
    for (Eigen::Index j = 0; j < dy.cols(); ++j) {
      const auto xh = cache.xhat.col(j).array();
      const auto d = dy.col(j).array();
      dg.array() += d * xh;
      auto dxj = dx.col(j).array();
      dxj = d * g;
      const T sum_d = dxj.sum();
      const T sum_dx = (dxj * xh).sum();
      dxj = (dxj * n - sum_d - xh * sum_dx) * (cache.inv_std(j) / n);
    }
    gain.grad.col(0) += dg;
    bias.grad.col(0) += RowSum(dy);
    return dx;
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) {
    fn(prefix + "gain", gain);
    fn(prefix + "bias", bias);
  }
};

// Depthwise 1-D convolution along frames, "same"-style padding (k-1)/2.
template <typename T>
struct DepthwiseConv {
  Param<T> w, b;
  int stride = 1;

  DepthwiseConv() = default;
  DepthwiseConv(int channels, int kernel, int stride_) : w(channels, kernel), b(channels, 1), stride(stride_) {
    Require(kernel % 2 == 1, ErrorCode::kInvalidArgument, "depthwise kernel must be odd");
  }

  int kernel() const { return static_cast<int>(w.value.cols()); }
  int pad() const { return (kernel() - 1) / 2; }
  Eigen::Index OutLen(Eigen::Index in_len) const {
    return (in_len + 2 * pad() - kernel()) / stride + 1;
  }

  void InitUniform(Rng &rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(kernel()));
    FillUniform(w.value, rng, bound);
    FillUniform(b.value, rng, bound);
  }

  Mat<T> Forward(const Mat<T> &x) const {
    const Eigen::Index in_len = x.cols(), out_len = OutLen(in_len);
    Mat<T> y(x.rows(), out_len);
    for (Eigen::Index t = 0; t < out_len; ++t) {
      auto yt = y.col(t).array();
      yt = b.value.col(0).array();
      const Eigen::Index base = t * stride - pad();
      for (int j = 0; j < kernel(); ++j) {
        const Eigen::Index i = base + j;
        if (i >= 0 && i < in_len) yt += w.value.col(j).array() * x.col(i).array();
      }
    }
    return y;
  }

  Mat<T> Backward(const Mat<T> &x, const Mat<T> &dy) {
    const Eigen::Index in_len = x.cols(), out_len = dy.cols();
    Mat<T> dx = Mat<T>::Zero(x.rows(), in_len);
    Mat<T> dw = Mat<T>::Zero(w.value.rows(), w.value.cols());
    for (Eigen::Index t = 0; t < out_len; ++t) {
      const auto g = dy.col(t).array();
      const Eigen::Index base = t * stride - pad();
      for (int j = 0; j < kernel(); ++j) {
        const Eigen::Index i = base + j;
        if (i < 0 || i >= in_len) continue;
        dw.col(j).array() += g * x.col(i).array();
        dx.col(i).array() += g * w.value.col(j).array();
      }
    }
    w.grad += dw;
    b.grad.col(0) += RowSum(dy);
    return dx;
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) {
    fn(prefix + "w", w);
    fn(prefix + "b", b);
  }
};

// Nearest-neighbour x2 upsampling, cropped to out_len.
template <typename T>
Mat<T> Upsample2(const Mat<T> &x, Eigen::Index out_len) {
  Mat<T> y(x.rows(), out_len);
  for (Eigen::Index t = 0; t < out_len; ++t) y.col(t) = x.col(std::min(t / 2, x.cols() - 1));
  return y;
}

template <typename T>
Mat<T> Upsample2Backward(const Mat<T> &dy, Eigen::Index in_len) {
  Mat<T> dx = Mat<T>::Zero(dy.rows(), in_len);
  for (Eigen::Index t = 0; t < dy.cols(); ++t) dx.col(std::min(t / 2, in_len - 1)) += dy.col(t);
  return dx;
}

// Feature-wise linear modulation: gamma(c) * h + beta(c), broadcast over frames.
template <typename T>
struct Film {
  Dense<T> gamma, beta;

  Film() = default;
  Film(int condition_dim, int channels) : gamma(condition_dim, channels), beta(condition_dim, channels) {
    InitIdentity();
  }

  void InitIdentity() {
    gamma.w.value.setZero();
    gamma.b.value.setOnes();
    beta.w.value.setZero();
    beta.b.value.setZero();
  }

  Mat<T> Forward(const Mat<T> &h, const Vec<T> &c) const {
    const Mat<T> g = gamma.Forward(c), s = beta.Forward(c);
    return ((h.array().colwise() * g.col(0).array()).colwise() + s.col(0).array()).matrix();
  }

  // Returns dh; adds the condition gradient into *dc.
  Mat<T> Backward(const Mat<T> &h, const Vec<T> &c, const Mat<T> &dy, Vec<T> *dc) {
    const Mat<T> g = gamma.Forward(c);
    const Mat<T> dgamma = RowSum<T>(dy.cwiseProduct(h));
    const Mat<T> dbeta = RowSum(dy);
    const Mat<T> cm = c;
    *dc += gamma.Backward(cm, dgamma).col(0);
    *dc += beta.Backward(cm, dbeta).col(0);
    return (dy.array().colwise() * g.col(0).array()).matrix();
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) {
    gamma.Visit(prefix + "gamma.", fn);
    beta.Visit(prefix + "beta.", fn);
  }
};

// Learned analysis filterbank: frame t covers samples [t*stride, t*stride+K).
template <typename T>
struct FrameConv {
  Param<T> w;  // [channels x K]
  int stride = 1;

  FrameConv() = default;
  FrameConv(int channels, int kernel, int stride_) : w(channels, kernel), stride(stride_) {}

  int kernel() const { return static_cast<int>(w.value.cols()); }

  void InitUniform(Rng &rng) {
    FillUniform(w.value, rng, 1.0 / std::sqrt(static_cast<double>(kernel())));
  }

  // Padded length and frame count covering n samples.
  Eigen::Index Frames(Eigen::Index n) const {
    if (n <= kernel()) return 1;
    return (n - kernel() + stride - 1) / stride + 1;
  }
  Eigen::Index PaddedLen(Eigen::Index n) const { return (Frames(n) - 1) * stride + kernel(); }

  // x must already be padded to PaddedLen.
  Mat<T> Forward(std::span<const T> x) const {
    const Eigen::Index frames = (static_cast<Eigen::Index>(x.size()) - kernel()) / stride + 1;
    ConstStridedMap<T> cols(x.data(), kernel(), frames, Eigen::OuterStride<>(stride));
    Mat<T> y(w.value.rows(), frames);
    y.noalias() = w.value * cols;
    return y;
  }

  // Accumulates dW; writes dx when non-empty.
  void Backward(std::span<const T> x, const Mat<T> &dy, std::span<T> dx = {}) {
    const Eigen::Index frames = dy.cols();
    ConstStridedMap<T> cols(x.data(), kernel(), frames, Eigen::OuterStride<>(stride));
    w.grad.noalias() += dy * cols.transpose();
    if (!dx.empty()) {
      std::fill(dx.begin(), dx.end(), T(0));
      const Mat<T> dcols = w.value.transpose() * dy;
      for (Eigen::Index t = 0; t < frames; ++t)
        for (int k = 0; k < kernel(); ++k) dx[t * stride + k] += dcols(k, t);
    }
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) { fn(prefix + "w", w); }
};

// Learned synthesis filterbank (transposed FrameConv) with overlap-add.
template <typename T>
struct OverlapAdd {
  Param<T> w;  // [channels x K]
  int stride = 1;

  OverlapAdd() = default;
  OverlapAdd(int channels, int kernel, int stride_) : w(channels, kernel), stride(stride_) {}

  int kernel() const { return static_cast<int>(w.value.cols()); }

  void InitUniform(Rng &rng) {
    FillUniform(w.value, rng, 1.0 / std::sqrt(static_cast<double>(w.value.rows())));
  }

  std::vector<T> Forward(const Mat<T> &y) const {
    const Eigen::Index frames = y.cols();
    std::vector<T> out(static_cast<std::size_t>((frames - 1) * stride + kernel()), T(0));
    const Mat<T> seg = w.value.transpose() * y;  // [K x frames]
    for (Eigen::Index t = 0; t < frames; ++t)
      for (int k = 0; k < kernel(); ++k) out[t * stride + k] += seg(k, t);
    return out;
  }

  // Returns dy.
  Mat<T> Backward(const Mat<T> &y, std::span<const T> dout) {
    const Eigen::Index frames = y.cols();
    ConstStridedMap<T> dseg(dout.data(), kernel(), frames, Eigen::OuterStride<>(stride));
    w.grad.noalias() += y * dseg.transpose();
    Mat<T> dy(y.rows(), frames);
    dy.noalias() = w.value * dseg;
    return dy;
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) { fn(prefix + "w", w); }
};

// Multi-head attention pooling over frames. Each head scores frames with a
// learned query and averages its slice of a linear value projection.
template <typename T>
struct AttentionPool {
  Dense<T> value;
  Param<T> query;  // [channels x heads]

  struct Cache {
    Mat<T> values;   // [out_dim x frames]
    Mat<T> weights;  // [heads x frames]
  };

  AttentionPool() = default;
  AttentionPool(int channels, int out_dim, int heads) : value(channels, out_dim), query(channels, heads) {
    Require(heads > 0 && out_dim % heads == 0, ErrorCode::kInvalidArgument,
            "attention pooling: out_dim must be divisible by heads");
  }

  int heads() const { return static_cast<int>(query.value.cols()); }
  int out_dim() const { return value.out(); }

  void InitUniform(Rng &rng) {
    value.InitUniform(rng);
    FillUniform(query.value, rng, 1.0 / std::sqrt(static_cast<double>(query.value.rows())));
  }

  Vec<T> Forward(const Mat<T> &z, Cache *cache) const {
    const T scale = T(1) / std::sqrt(static_cast<T>(z.rows()));
    Mat<T> v = value.Forward(z);
    Mat<T> weights(heads(), z.cols());
    const int slice = out_dim() / heads();
    Vec<T> out(out_dim());
    for (int h = 0; h < heads(); ++h) {
      Eigen::Matrix<T, 1, Eigen::Dynamic> s = (query.value.col(h).transpose() * z) * scale;
      s.array() -= s.maxCoeff();
      s = s.array().exp().matrix();
      s /= s.sum();
      weights.row(h) = s;
      out.segment(h * slice, slice).noalias() = v.middleRows(h * slice, slice) * s.transpose();
    }
    if (cache) {
      cache->values = std::move(v);
      cache->weights = std::move(weights);
    }
    return out;
  }

  // Returns dz.
  Mat<T> Backward(const Mat<T> &z, const Cache &cache, const Vec<T> &dout) {
    const T scale = T(1) / std::sqrt(static_cast<T>(z.rows()));
    const int slice = out_dim() / heads();
    Mat<T> dv(out_dim(), z.cols());
    Mat<T> dz = Mat<T>::Zero(z.rows(), z.cols());
    for (int h = 0; h < heads(); ++h) {
      const auto a = cache.weights.row(h);
      const auto g = dout.segment(h * slice, slice);
      dv.middleRows(h * slice, slice).noalias() = g * a;
      const Eigen::Matrix<T, 1, Eigen::Dynamic> da =
          g.transpose() * cache.values.middleRows(h * slice, slice);
      const T dot = (a.array() * da.array()).sum();
      const Eigen::Matrix<T, 1, Eigen::Dynamic> ds = (a.array() * (da.array() - dot)).matrix() * scale;
      query.grad.col(h).noalias() += z * ds.transpose();
      dz.noalias() += query.value.col(h) * ds;
    }
    dz += value.Backward(z, dv);
    return dz;
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) {
    value.Visit(prefix + "value.", fn);
    fn(prefix + "query", query);
  }
};

// Two-layer perceptron with a rectifier between the layers.
template <typename T>
struct Mlp {
  Dense<T> l1, l2;

  struct Cache {
    Mat<T> input, pre;
  };

  Mlp() = default;
  Mlp(int in, int hidden, int out) : l1(in, hidden), l2(hidden, out) {}

  Vec<T> Forward(const Vec<T> &x, Cache *cache) const {
    Mat<T> xm = x;
    Mat<T> pre = l1.Forward(xm);
    Vec<T> y = l2.Forward(Relu(pre)).col(0);
    if (cache) {
      cache->input = std::move(xm);
      cache->pre = std::move(pre);
    }
    return y;
  }

  Vec<T> Backward(const Cache &cache, const Vec<T> &dy) {
    const Mat<T> dym = dy;
    const Mat<T> dh = l2.Backward(Relu(cache.pre), dym);
    return l1.Backward(cache.input, ReluBackward(cache.pre, dh)).col(0);
  }

  void Visit(const std::string &prefix, const ParamVisitor<T> &fn) {
    l1.Visit(prefix + "l1.", fn);
    l2.Visit(prefix + "l2.", fn);
  }
};

}  // namespace octsep::nn

#endif  // OCTSEP_NN_LAYERS_H_
