#pragma once

// Planar initial chains. Every generator works in angle space: it picks link
// angles θ_k and link angular velocities θ̇_k at the link midpoints
// s = (k - 1/2)/n, so the length constraint holds exactly.
//
// Generators and their parameters (defaults in brackets):
//   straight        angle [0]
//   rigid_rotation  omega [1], angle [0]
//   folded          omega [1], fold [0.5]
//                   links nearer the free end than `fold` point back along
//                   the others; only the fixed-end segment rotates, which
//                   drives the free-end tensions negative
//   perturbed       amplitude [0.1], modes [3]; hanging straight down with a
//                   random smooth transverse velocity (seeded)
//   log_spiral      omega [1]; θ(s) = (2/3) ln s + atan(2/3) + π
//   power_angle     q [0.75], scale [1], omega [1]; θ(s) = scale s^q
//   near_loop       turn [6], width [0.12], center [0.6], omega [3],
//                   angle [0]; one nearly closed loop of total turn `turn`
//                   spread over `width` around `center`, rotating rigidly

#include "whip/core.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace whip {

using ParamMap = std::map<std::string, double>;

class UnknownGenerator : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Builds a chain from link angles and angular velocities (both length n).
ChainState chain_from_angles(const Vec& theta, const Vec& theta_dot, double time = 0.0);

ChainState make_initial(const std::string& generator, int n, const ParamMap& params = {}, std::uint64_t seed = 0);

std::vector<std::string> generator_names();

// Parameter names a generator accepts; throws UnknownGenerator.
std::vector<std::string> generator_parameters(const std::string& generator);

}  // namespace whip
