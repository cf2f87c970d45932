#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "spectral_wick/fft.hpp"

namespace fft = spectral_wick::fft;
using cd = std::complex<double>;

TEST_CASE("next_pow2 rounds up to the enclosing power of two") {
  CHECK(fft::next_pow2(1) == 1);
  CHECK(fft::next_pow2(2) == 2);
  CHECK(fft::next_pow2(3) == 4);
  CHECK(fft::next_pow2(1024) == 1024);
  CHECK(fft::next_pow2(1025) == 2048);
}

TEST_CASE("delta input transforms to a flat spectrum") {
  std::vector<cd> data(8, cd(0.0, 0.0));
  data[0] = cd(1.0, 0.0);
  fft::transform(data, false);
  for (const cd& v : data) {
    CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("a pure cosine concentrates on its two conjugate bins") {
  const std::size_t n = 64;
  std::vector<cd> data(n);
  const int k0 = 5;
  for (std::size_t j = 0; j < n; ++j) {
    data[j] = cd(std::cos(2.0 * M_PI * k0 * static_cast<double>(j) / n), 0.0);
  }
  fft::transform(data, false);
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = (k == static_cast<std::size_t>(k0) ||
                             k == n - static_cast<std::size_t>(k0))
                                ? n / 2.0
                                : 0.0;
    CHECK(std::abs(data[k] - cd(expected, 0.0)) < 1e-10);
  }
}

TEST_CASE("forward then inverse is the identity") {
  const std::size_t n = 256;
  std::vector<cd> data(n);
  for (std::size_t j = 0; j < n; ++j) {
    data[j] = cd(std::sin(0.1 * j) + 0.3 * j, std::cos(0.05 * j));
  }
  std::vector<cd> orig = data;
  fft::transform(data, false);
  fft::transform(data, true);
  for (std::size_t j = 0; j < n; ++j) {
    CHECK(std::abs(data[j] - orig[j]) < 1e-10);
  }
}
