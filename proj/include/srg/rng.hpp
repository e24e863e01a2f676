#pragma once

// Counter-based random stream. A draw is a pure function of
// (seed, step, lane), so every optimiser step consumes fixed, documented
// positions and any trace can be replayed from the seed alone.
//
// Lane layout used by the optimisers for step k and batch slot j:
//   lane 2j     index draw
//   lane 2j + 1 Bernoulli gate (SRG) / unused
//   lane 2m     reference refresh coin (loopless SVRG, batch m)
// Shuffled SGD uses step = epoch, lane = Fisher-Yates position.

#include <cstdint>

namespace srg {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed = 0) noexcept
      : key_(mix64(seed ^ 0x5bd1e9955bd1e995ULL)) {}

  constexpr std::uint64_t bits(std::uint64_t step,
                               std::uint64_t lane) const noexcept {
    return mix64(key_ ^ mix64(step * 0xd1342543de82ef95ULL + mix64(lane)));
  }

  // Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t step,
                           std::uint64_t lane) const noexcept {
    return static_cast<double>(bits(step, lane) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), scaled from a 53-bit uniform.
  std::uint64_t below(std::uint64_t step, std::uint64_t lane,
                      std::uint64_t bound) const noexcept {
    const double u = uniform(step, lane);
    const auto r = static_cast<std::uint64_t>(u * static_cast<double>(bound));
    return r < bound ? r : bound - 1;
  }

 private:
  std::uint64_t key_;
};

}  // namespace srg
