#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace countac {

// Per-state agent tally n_t(i). Entries are nonnegative and sum to the
// population size.
using StateCounts = std::vector<std::int64_t>;

// View over the count tables available at a decision point within one step.
// State counts are always present; action counts become available once the
// step's actions have been drawn (congestion-style dynamics need them).
struct CountTables {
  std::span<const std::int64_t> n_s;
  std::span<const std::int64_t> n_sa;  // row-major |S| x |A|, may be empty
  int num_actions = 0;

  std::int64_t state(int i) const { return n_s[static_cast<std::size_t>(i)]; }
  std::int64_t state_action(int i, int j) const {
    return n_sa[static_cast<std::size_t>(i) * num_actions + j];
  }
  bool has_actions() const { return !n_sa.empty(); }
};

// Fills `out` (length |S|) with the successor distribution for an agent in
// state i taking action j at time t, given the current count tables.
using TransitionFn =
    std::function<void(int t, int i, int j, const CountTables&, std::span<double> out)>;

// Immediate reward for one agent at (i, j) at time t under the given counts.
using RewardFn = std::function<double(int t, int i, int j, const CountTables&)>;

// Domain-specific observation features beyond agent counts (e.g. demand).
using ExtraObsFn =
    std::function<void(int t, int i, const StateCounts&, std::span<double> out)>;

// One population model instance: spaces, horizon, population size, dynamics
// callbacks and the state neighborhood graph used by the oN observation.
struct ModelSpec {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::int64_t population = 0;
  std::vector<double> initial_dist;
  TransitionFn transition;
  RewardFn reward;
  std::vector<std::vector<int>> neighborhood;
  bool time_dependent = false;

  int extra_obs_dim = 0;
  ExtraObsFn extra_obs;

  int max_neighbors() const;

  // Throws std::invalid_argument when the structural invariants are broken
  // (initial distribution not a distribution, bad neighbor lists, ...).
  void validate() const;
};

// Count tables for one time step.
struct CountStep {
  StateCounts n_s;                  // |S|
  std::vector<std::int64_t> n_sa;   // |S| x |A| row-major
  std::vector<std::int64_t> n_sas;  // |S| x |A| x |S|; empty on the last step

  std::int64_t sa(int i, int j, int num_actions) const {
    return n_sa[static_cast<std::size_t>(i) * num_actions + j];
  }
  std::int64_t sas(int i, int j, int k, int num_actions, int num_states) const {
    return n_sas[(static_cast<std::size_t>(i) * num_actions + j) * num_states + k];
  }
  CountTables tables(int num_actions) const {
    return CountTables{n_s, n_sa, num_actions};
  }
  CountTables tables_states_only() const { return CountTables{n_s, {}, 0}; }
};

// The sufficient statistic of one rollout: count tables for t = 0..H-1.
// The final step carries no successor table.
struct CountTrajectory {
  std::vector<CountStep> steps;
};

enum class ObsKind { o0, o1, oN };

ObsKind obs_kind_from_string(const std::string& s);
std::string to_string(ObsKind k);

// Controls which count information the policy (and critic) observe:
//   o0: local state and time only
//   o1: plus own-state count
//   oN: plus neighbor-state counts and any domain extra features
struct ObservationModel {
  ObsKind kind = ObsKind::o1;

  int count_dim(const ModelSpec& m) const;
  int extra_dim(const ModelSpec& m) const;
  int obs_dim(const ModelSpec& m) const { return count_dim(m) + extra_dim(m); }
  int policy_input_dim(const ModelSpec& m) const {
    return m.num_states + obs_dim(m) + 1;
  }
  int critic_input_dim(const ModelSpec& m) const {
    return m.num_states + m.num_actions + obs_dim(m) + 1;
  }
};

// One failed consistency constraint, with its location. -1 marks an index
// that does not apply to the constraint.
struct Violation {
  std::string constraint;
  int t = -1;
  int i = -1;
  int j = -1;
};

// Checks the consistency constraints on a trajectory: per-step population
// sum, action marginals, transition marginals and cross-step flow
// conservation. Empty result means the trajectory is consistent.
std::vector<Violation> validate_trajectory(const CountTrajectory& traj,
                                           const ModelSpec& model);

// Policy input features for an agent in state i at time t:
// [one-hot(i) | count features / M | extras | t/H]. Counts are normalized by
// population so feature scales do not depend on M.
void policy_features(const ModelSpec& model, const ObservationModel& obs, int i,
                     const StateCounts& n_s, int t, std::span<double> out);

// Critic input features: [one-hot(i) | one-hot(j) | obs features | t/H].
void critic_features(const ModelSpec& model, const ObservationModel& obs, int i,
                     int j, const StateCounts& n_s, int t, std::span<double> out);

// Allocating convenience wrapper around policy_features.
std::vector<double> observe(const ModelSpec& model, const ObservationModel& obs,
                            int i, const StateCounts& n_s, int t);

// Generic count-independent model loaded from a JSON document with tabular
// transition and reward blocks. Throws std::runtime_error with a message on
// malformed input.
ModelSpec load_model_json(const std::string& path);

}  // namespace countac
