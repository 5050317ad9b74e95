#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace autores {

/// Seed for job `index` of an ensemble rooted at `seed0`. Depends only on the
/// pair, so ensembles reproduce under any worker schedule.
std::uint64_t stream_seed(std::uint64_t seed0, std::uint64_t index);

/// Portable uniform/normal draws on top of mt19937_64 (std distributions are
/// implementation-defined, which would break byte-identical outputs).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTau * u2);
    has_spare_ = true;
    return r * std::cos(kTau * u2);
  }

 private:
  static constexpr double kTau = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace autores
