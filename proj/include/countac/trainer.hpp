#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "countac/batch.hpp"
#include "countac/model.hpp"
#include "countac/nets.hpp"
#include "countac/values.hpp"

namespace countac {

// Update-rule combination: the critic is trained either per-(state, action)
// against individual values (f...C) or against aggregate per-step returns
// (..C); the actor pairs each score term with its own critic factor (fA..)
// or with the globally summed critic (A..).
enum class Variant { fAfC, AC, AfC, fAC };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

struct TrainConfig {
  Variant variant = Variant::fAfC;
  int batch_size = 100;
  int iterations = 1000;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  int eval_interval = 20;
  int eval_samples = 30;
  std::uint64_t seed = 1;
  double clip_norm = 10.0;
  ObsKind observation = ObsKind::o1;
  bool early_stop = false;
  int early_stop_window = 20;
  double early_stop_rel = 1e-3;
  double scaler_decay = 0.999;

  void validate() const;
};

struct MetricRecord {
  int iteration = 0;
  double return_mean = 0.0;
  double return_stderr = 0.0;
  double critic_loss = 0.0;
  double actor_grad_norm = 0.0;
  double elapsed_ms = 0.0;  // wall time; informational, not reproducible
};

struct TrainMetrics {
  std::vector<MetricRecord> records;
};

struct TrainHooks {
  std::function<void(const MetricRecord&)> on_metric;
  std::function<void(const PolicyNet&, const CriticNet&, int iteration)>
      on_checkpoint;
};

struct TrainResult {
  PolicyNet policy;
  CriticNet critic;
  TrainMetrics metrics;
};

struct CriticUpdate {
  double loss = 0.0;       // post-step loss on the same batch and targets
  double grad_norm = 0.0;  // pre-clip gradient norm
};

// One Adam step on the count-weighted per-entry regression
//   L = (1/K) sum_xi sum_{t,i,j} n(i,j) (f_w(i,j,o) - V~)^2
// with targets normalized through the scaler.
CriticUpdate critic_update_factored(const ModelSpec& model,
                                    const ObservationModel& obs,
                                    const std::vector<CountTrajectory>& batch,
                                    const std::vector<IndividualValueTable>& values,
                                    CriticNet& critic, AdamState& state,
                                    TargetScaler& scaler, double lr,
                                    double clip_norm, int workers,
                                    bool want_post_loss = true);

// One Adam step on the per-step aggregate regression
//   L = (1/K) sum_xi sum_t (sum_{i,j} n f_w - R~_t)^2
// where the target is the count-weighted sum of individual values.
CriticUpdate critic_update_global(const ModelSpec& model,
                                  const ObservationModel& obs,
                                  const std::vector<CountTrajectory>& batch,
                                  const std::vector<IndividualValueTable>& values,
                                  CriticNet& critic, AdamState& state,
                                  TargetScaler& scaler, double lr,
                                  double clip_norm, int workers,
                                  bool want_post_loss = true);

// Unscaled losses at the current parameters; used by the variance-bound
// check, which must compare the two losses on the raw target scale.
double critic_loss_factored_raw(const ModelSpec& model,
                                const ObservationModel& obs,
                                const std::vector<CountTrajectory>& batch,
                                const std::vector<IndividualValueTable>& values,
                                const CriticNet& critic, int workers);
double critic_loss_global_raw(const ModelSpec& model,
                              const ObservationModel& obs,
                              const std::vector<CountTrajectory>& batch,
                              const std::vector<IndividualValueTable>& values,
                              const CriticNet& critic, int workers);

// Policy-gradient estimate pairing every score term with its own critic
// factor:
//   (1/K) sum_xi sum_t sum_{i,j} n(i,j) grad log pi(j|i,o) f_w(i,j,o).
// Clipped to clip_norm; raw_norm (when given) receives the pre-clip norm.
std::vector<double> actor_grad_factored(const ModelSpec& model,
                                        const ObservationModel& obs,
                                        const std::vector<CountTrajectory>& batch,
                                        const PolicyNet& policy,
                                        const CriticNet& critic,
                                        double clip_norm, int workers,
                                        double* raw_norm = nullptr);

// Policy-gradient estimate pairing the summed score with the summed critic:
//   (1/K) sum_xi sum_t [sum_{i,j} n grad log pi][sum_{i,j} n f_w].
std::vector<double> actor_grad_global(const ModelSpec& model,
                                      const ObservationModel& obs,
                                      const std::vector<CountTrajectory>& batch,
                                      const PolicyNet& policy,
                                      const CriticNet& critic, double clip_norm,
                                      int workers, double* raw_norm = nullptr);

// Full training loop: sample a batch of count trajectories, compute
// individual values, one critic step and one actor step per iteration,
// periodic evaluation. Deterministic for a fixed config and any worker
// count. On a numeric failure the last good parameters are handed to
// hooks->on_checkpoint before the error propagates.
TrainResult train(const ModelSpec& model, const TrainConfig& cfg, int workers,
                  const TrainHooks* hooks = nullptr);

}  // namespace countac
