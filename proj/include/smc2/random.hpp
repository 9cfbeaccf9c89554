// Copyright 2026 The adaptive-smc2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SMC2_RANDOM_HPP
#define SMC2_RANDOM_HPP

#include <cstdint>
#include <limits>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace smc2 {

/// Engine used by every sampler in the library.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

/// Index reserved for the coordinator's stream within an epoch.
inline constexpr std::uint64_t kCoordinatorStream = std::numeric_limits<std::uint64_t>::max();

/// Derives an independent engine from (master seed, epoch, index).
///
/// Every parallelisable loop draws one epoch and gives item `i` the stream
/// `(seed, epoch, i)`, so results do not depend on execution order.
inline Rng make_stream(std::uint64_t seed, std::uint64_t epoch, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (epoch + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (index + 0x8cb92ba72f3d8dd7ULL));
  return Rng{h};
}

/// Hands out epochs for one run.
class StreamFactory {
 public:
  StreamFactory() = default;
  explicit StreamFactory(std::uint64_t seed) : seed_{seed} {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t next_epoch() noexcept { return epoch_++; }
  [[nodiscard]] Rng stream(std::uint64_t epoch, std::uint64_t index) const {
    return make_stream(seed_, epoch, index);
  }
  /// Fresh coordinator engine on its own epoch.
  [[nodiscard]] Rng coordinator() { return stream(next_epoch(), kCoordinatorStream); }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t epoch_ = 0;
};

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>{0.0, 1.0}(rng); }

// Ziggurat sampler; std::normal_distribution caches half of each pair and
// is several times slower when constructed per draw.
inline double standard_normal(Rng& rng) { return boost::random::normal_distribution<double>{}(rng); }

}  // namespace smc2

#endif  // SMC2_RANDOM_HPP
