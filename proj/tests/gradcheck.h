// Central finite-difference gradient checking for double-precision layers.

#ifndef OCTSEP_TESTS_GRADCHECK_H_
#define OCTSEP_TESTS_GRADCHECK_H_

#include <cmath>
#include <functional>

#include "nn/tensor.h"

namespace octsep::testing {

// ||analytic - numeric|| / max(||analytic||, ||numeric||), with numeric
// obtained by perturbing every entry of `values` by +-step.
inline double GradRelError(nn::Mat<double> &values, const nn::Mat<double> &analytic,
                           const std::function<double()> &loss, double step = 1e-5) {
  nn::Mat<double> numeric(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double keep = values.data()[i];
    values.data()[i] = keep + step;
    const double up = loss();
    values.data()[i] = keep - step;
    const double down = loss();
    values.data()[i] = keep;
    numeric.data()[i] = (up - down) / (2 * step);
  }
  const double scale = std::max({analytic.norm(), numeric.norm(), 1e-300});
  return (analytic - numeric).norm() / scale;
}

}  // namespace octsep::testing

#endif  // OCTSEP_TESTS_GRADCHECK_H_
