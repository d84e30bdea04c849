// nn/tensor.h

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

#ifndef OCTSEP_NN_TENSOR_H_
#define OCTSEP_NN_TENSOR_H_

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <string>

#include "base/random.h"

namespace octsep::nn {

// Feature maps are [channels x frames], column-major, so one frame is a
// contiguous column.
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
struct Param {
  Mat<T> value;
  Mat<T> grad;

  Param() = default;
  Param(Eigen::Index rows, Eigen::Index cols)
      : value(Mat<T>::Zero(rows, cols)), grad(Mat<T>::Zero(rows, cols)) {}

  void ZeroGrad() { grad.setZero(value.rows(), value.cols()); }
  Eigen::Index size() const { return value.size(); }
};

template <typename T>
using ParamVisitor = std::function<void(const std::string &, Param<T> &)>;

template <typename T>
void FillUniform(Mat<T> &m, Rng &rng, double bound) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = static_cast<T>(Uniform(rng, -bound, bound));
}

template <typename T>
void FillGaussian(Mat<T> &m, Rng &rng, double stddev) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = static_cast<T>(stddev * Gaussian(rng));
}

// Sum over frames (columns) as a matrix-vector product.
template <typename T>
Vec<T> RowSum(const Mat<T> &x) {
  return x * Vec<T>::Ones(x.cols());
}

template <typename T>
bool AllFinite(const Mat<T> &m) {
  return m.allFinite();
}

}  // namespace octsep::nn

#endif  // OCTSEP_NN_TENSOR_H_
