#pragma once

#include <cstdint>
#include <functional>

#include "countac/model.hpp"

namespace countac {

// Visits every consistent count trajectory of the model exactly once.
// Generation is purely combinatorial (compositions of the population over
// states, actions and successors), independent of any sampling code, which
// is what makes it usable as a ground-truth oracle for the sampler and the
// trajectory log-probability. Throws std::length_error once more than
// `limit` trajectories have been visited; only tiny instances are feasible.
void enumerate_count_trajectories(
    const ModelSpec& model,
    const std::function<void(const CountTrajectory&)>& visit,
    std::uint64_t limit = 100'000'000);

// All length-k nonnegative integer vectors summing to n, in lexicographic
// order.
void for_each_composition(std::int64_t n, int k,
                          const std::function<void(std::span<const std::int64_t>)>& visit);

}  // namespace countac
