#include "spectral_wick/rng.hpp"

#include <cmath>
#include <numbers>

#include "spectral_wick/parallel.hpp"

namespace spectral_wick {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(Philox4x32::Counter& x, const Philox4x32::Key& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter counter, Key key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t b) {
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter counter = {
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32)};
  const auto y = Philox4x32::block(counter, key);

  // 53-bit uniforms; u1 in (0, 1] keeps the logarithm finite.
  const double u1 =
      (static_cast<double>(join(y[0], y[1]) >> 11) + 1.0) * 0x1p-53;
  const double u2 = static_cast<double>(join(y[2], y[3]) >> 11) * 0x1p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

double NormalStream::next() {
  const std::uint64_t b = index_ / 2;
  const auto pair = normal_pair(seed_, stream_, b);
  return pair[index_++ % 2];
}

void fill_normals(std::uint64_t seed, std::uint64_t stream,
                  std::span<double> out) {
  if (out.empty()) return;
  const std::size_t blocks = (out.size() + 1) / 2;
  parallel_for(blocks, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t b = lo; b < hi; ++b) {
      const auto pair = normal_pair(seed, stream, b);
      out[2 * b] = pair[0];
      if (2 * b + 1 < out.size()) out[2 * b + 1] = pair[1];
    }
  });
}

}  // namespace spectral_wick
