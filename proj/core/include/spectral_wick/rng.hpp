#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace spectral_wick {

// Philox-4x32-10 counter-based generator.  Outputs are a pure function of
// (key, counter), which makes every draw randomly accessible: parallel fills
// produce bit-identical results for any thread count.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

// Standard normal variates derived from Philox blocks via Box-Muller.  Each
// 128-bit block yields two normals, so variate k of a stream depends only on
// (seed, stream, k).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  double next();

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t index_ = 0;
};

// out[k] = variate k of the stream; parallelized internally, thread-count
// invariant.
void fill_normals(std::uint64_t seed, std::uint64_t stream,
                  std::span<double> out);

// The two normals of block `b` of a stream.
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t b);

}  // namespace spectral_wick
