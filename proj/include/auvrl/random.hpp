#ifndef AUVRL_RANDOM_HPP_
#define AUVRL_RANDOM_HPP_

#include <cstdint>
#include <random>

#include "auvrl/so3.hpp"

namespace auvrl {

using Rng = std::mt19937_64;

// Independent stream for (seed, stream_id). Streams for different ids are
// decorrelated through seed_seq mixing.
Rng MakeStream(std::uint64_t seed, std::uint64_t stream_id);

double Uniform(Rng& rng, double lo, double hi);
double StandardNormal(Rng& rng);

// Uniform direction on S^2.
Vec3 UniformUnitVector(Rng& rng);

// Uniform point in the ball of the given radius.
Vec3 UniformInBall(Rng& rng, double radius);

// Haar-uniform rotation (Shoemake's subgroup algorithm).
Quat UniformRotation(Rng& rng);

}  // namespace auvrl

#endif  // AUVRL_RANDOM_HPP_
