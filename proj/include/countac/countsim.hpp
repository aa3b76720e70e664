#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "countac/model.hpp"
#include "countac/nets.hpp"
#include "countac/rng.hpp"

namespace countac {

// Full state-action record of a single agent.
struct AgentTrajectory {
  std::vector<int> states;
  std::vector<int> actions;
};

// Draws one count trajectory from the population process: the initial counts
// multinomially from the initial distribution, per-state action counts
// multinomially from the policy, per-(state, action) successor counts
// multinomially from the transition kernel, and the next state counts by
// flow conservation.
CountTrajectory sample_counts(const ModelSpec& model, const PolicyNet& policy,
                              const ObservationModel& obs, Rng& rng);

// Reference simulator that rolls every agent forward individually against
// the shared count tables. The returned count trajectory is aggregated
// exactly from the agent records. Guarded to small populations.
std::pair<std::vector<AgentTrajectory>, CountTrajectory> sample_agents_oracle(
    const ModelSpec& model, const PolicyNet& policy, const ObservationModel& obs,
    Rng& rng);

// Exact log P(trajectory) under the model and policy: the log multiplicity of
// ordered agent trajectories with these counts plus the log probability of
// one such ordering. Zero-count factors contribute nothing; a positive count
// on a zero-probability event yields -infinity. Throws on an inconsistent
// trajectory.
double count_log_prob(const CountTrajectory& traj, const ModelSpec& model,
                      const PolicyNet& policy, const ObservationModel& obs);

// Sum over steps T >= t of the count-weighted rewards (t is 0-based).
double empirical_return(const CountTrajectory& traj, const ModelSpec& model,
                        int t);

struct EvalResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  int samples = 0;
};

// Mean return over K independent rollouts; each rollout draws from its own
// child seed so the result does not depend on scheduling. workers <= 1 runs
// serially.
EvalResult evaluate_policy(const ModelSpec& model, const PolicyNet& policy,
                           const ObservationModel& obs, int K,
                           std::uint64_t seed, int workers = 1);

// Line-delimited JSON, one step per line; used for debugging and replaying
// fixed batches in tests.
void save_trajectory(const std::string& path, const CountTrajectory& traj);
CountTrajectory load_trajectory(const std::string& path);

}  // namespace countac
