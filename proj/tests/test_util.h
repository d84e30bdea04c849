// Shared helpers for the unit tests.

#ifndef OCTSEP_TESTS_TEST_UTIL_H_
#define OCTSEP_TESTS_TEST_UTIL_H_

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "base/random.h"
#include "signal/waveform.h"

namespace octsep::testing {

inline std::vector<double> RandomVector(Rng &rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double &x : v) x = scale * Gaussian(rng);
  return v;
}

inline Waveform RandomWave(Rng &rng, std::size_t n, int rate = 8000, double scale = 1.0) {
  return Waveform(RandomVector(rng, n, scale), rate);
}

inline double MaxAbsDiff(const std::vector<double> &a, const std::vector<double> &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path ScratchDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("octsep_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace octsep::testing

#endif  // OCTSEP_TESTS_TEST_UTIL_H_
