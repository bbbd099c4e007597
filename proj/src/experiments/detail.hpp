#pragma once

#include <cstdint>

#include "mploc/model.hpp"

namespace mploc::detail {

// Auxiliary uniform in [0, 1) for a trial, independent of the disorder.
inline double trial_uniform(std::uint64_t trial_seed, std::uint64_t stream) {
  return unit_uniform(mix64(trial_seed ^ mix64(stream + 0x5851f42d4c957f2dULL)));
}

}  // namespace mploc::detail
