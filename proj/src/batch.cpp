#include "countac/batch.hpp"

#include <omp.h>

namespace countac::batch {

namespace {

constexpr std::uint64_t kSampleStream = 0x5a6f1e8cull;
constexpr std::uint64_t kEvalStream = 0xe7a1b329ull;

}  // namespace

std::vector<CountTrajectory> sample_batch_serial(const ModelSpec& model,
                                                 const PolicyNet& policy,
                                                 const ObservationModel& obs,
                                                 int K, std::uint64_t seed,
                                                 std::uint64_t stream) {
  std::vector<CountTrajectory> out(K);
  for (int k = 0; k < K; ++k) {
    Rng rng(child_seed(seed, kSampleStream, stream, static_cast<std::uint64_t>(k)));
    out[k] = sample_counts(model, policy, obs, rng);
  }
  return out;
}

std::vector<CountTrajectory> sample_batch(const ModelSpec& model,
                                          const PolicyNet& policy,
                                          const ObservationModel& obs, int K,
                                          std::uint64_t seed,
                                          std::uint64_t stream, int workers) {
  if (workers <= 1) return sample_batch_serial(model, policy, obs, K, seed, stream);
  std::vector<CountTrajectory> out(K);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int k = 0; k < K; ++k) {
    Rng rng(child_seed(seed, kSampleStream, stream, static_cast<std::uint64_t>(k)));
    out[k] = sample_counts(model, policy, obs, rng);
  }
  return out;
}

std::vector<IndividualValueTable> values_batch_serial(
    const std::vector<CountTrajectory>& batch, const ModelSpec& model) {
  std::vector<IndividualValueTable> out(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k)
    out[k] = individual_values(batch[k], model);
  return out;
}

std::vector<IndividualValueTable> values_batch(
    const std::vector<CountTrajectory>& batch, const ModelSpec& model,
    int workers) {
  if (workers <= 1) return values_batch_serial(batch, model);
  std::vector<IndividualValueTable> out(batch.size());
  const int n = static_cast<int>(batch.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int k = 0; k < n; ++k) out[k] = individual_values(batch[k], model);
  return out;
}

std::vector<double> rollout_returns_serial(const ModelSpec& model,
                                           const PolicyNet& policy,
                                           const ObservationModel& obs, int K,
                                           std::uint64_t seed) {
  std::vector<double> out(K);
  for (int k = 0; k < K; ++k) {
    Rng rng(child_seed(seed, kEvalStream, static_cast<std::uint64_t>(k)));
    const CountTrajectory traj = sample_counts(model, policy, obs, rng);
    out[k] = empirical_return(traj, model, 0);
  }
  return out;
}

std::vector<double> rollout_returns(const ModelSpec& model,
                                    const PolicyNet& policy,
                                    const ObservationModel& obs, int K,
                                    std::uint64_t seed, int workers) {
  if (workers <= 1) return rollout_returns_serial(model, policy, obs, K, seed);
  std::vector<double> out(K);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int k = 0; k < K; ++k) {
    Rng rng(child_seed(seed, kEvalStream, static_cast<std::uint64_t>(k)));
    const CountTrajectory traj = sample_counts(model, policy, obs, rng);
    out[k] = empirical_return(traj, model, 0);
  }
  return out;
}

}  // namespace countac::batch
