#include "auvrl/random.hpp"

#include <cmath>
#include <numbers>

namespace auvrl {

Rng MakeStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x5eedu};
  return Rng(seq);
}

double Uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double StandardNormal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

Vec3 UniformUnitVector(Rng& rng) {
  for (;;) {
    const Vec3 g(StandardNormal(rng), StandardNormal(rng), StandardNormal(rng));
    const double n = g.norm();
    if (n > 1e-12) return g / n;
  }
}

Vec3 UniformInBall(Rng& rng, double radius) {
  if (radius <= 0.0) return Vec3::Zero();
  const double r = radius * std::cbrt(Uniform(rng, 0.0, 1.0));
  return r * UniformUnitVector(rng);
}

Quat UniformRotation(Rng& rng) {
  const double u1 = Uniform(rng, 0.0, 1.0);
  const double u2 = Uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double u3 = Uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return Normalized(
      {a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)});
}

}  // namespace auvrl
