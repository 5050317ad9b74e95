#include "autores/rng.hpp"

#include <array>

namespace autores {

std::uint64_t stream_seed(std::uint64_t seed0, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed0), static_cast<std::uint32_t>(seed0 >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace autores
