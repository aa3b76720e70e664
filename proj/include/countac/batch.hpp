#pragma once

#include <cstdint>
#include <vector>

#include "countac/countsim.hpp"
#include "countac/model.hpp"
#include "countac/nets.hpp"
#include "countac/values.hpp"

namespace countac::batch {

// Batch kernels. Every element of a batch derives its random stream from
// (seed, stream, index) and writes into its own slot, so the OpenMP versions
// produce results identical to the serial reference implementations for any
// worker count. The *_serial functions are the reference path kept for
// testing and benchmarking; the unsuffixed versions parallelize with OpenMP
// when workers > 1.

std::vector<CountTrajectory> sample_batch_serial(const ModelSpec& model,
                                                 const PolicyNet& policy,
                                                 const ObservationModel& obs,
                                                 int K, std::uint64_t seed,
                                                 std::uint64_t stream);

std::vector<CountTrajectory> sample_batch(const ModelSpec& model,
                                          const PolicyNet& policy,
                                          const ObservationModel& obs, int K,
                                          std::uint64_t seed,
                                          std::uint64_t stream, int workers);

std::vector<IndividualValueTable> values_batch_serial(
    const std::vector<CountTrajectory>& batch, const ModelSpec& model);

std::vector<IndividualValueTable> values_batch(
    const std::vector<CountTrajectory>& batch, const ModelSpec& model,
    int workers);

// Per-rollout empirical returns from t = 0 for K fresh rollouts.
std::vector<double> rollout_returns_serial(const ModelSpec& model,
                                           const PolicyNet& policy,
                                           const ObservationModel& obs, int K,
                                           std::uint64_t seed);

std::vector<double> rollout_returns(const ModelSpec& model,
                                    const PolicyNet& policy,
                                    const ObservationModel& obs, int K,
                                    std::uint64_t seed, int workers);

}  // namespace countac::batch
