#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ltn {

// Seeded Gaussian stream. Box-Muller over explicit 53-bit uniforms rather
// than std::normal_distribution, whose output sequence is
// implementation-defined; identical seeds must give identical parameters.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next(double mean, double stddev) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + stddev * spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean + stddev * r * std::cos(theta);
  }

 private:
  double uniform01() {  // [0, 1), 53 bits
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ltn
