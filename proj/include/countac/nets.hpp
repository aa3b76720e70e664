#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "countac/model.hpp"

namespace countac {

// Raised when a non-finite gradient or loss is detected; training aborts the
// iteration and surfaces diagnostics instead of silently corrupting state.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fully-connected network parameters stored as one flat array: per layer the
// row-major weight matrix (out x in) followed by the bias vector. Hidden
// activations are rectified-linear; the output stays linear and the caller
// decides what to put on top (softmax for policies, identity for critics).
struct MlpParams {
  std::vector<int> layer_sizes;  // [in, hidden..., out]
  std::vector<double> flat;

  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int param_count() const { return static_cast<int>(flat.size()); }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }

  std::size_t weight_offset(int layer) const;
  std::size_t bias_offset(int layer) const;

  static MlpParams zeros(std::vector<int> sizes);
  // Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)) per layer.
  static MlpParams glorot(std::vector<int> sizes, std::uint64_t seed);
};

// Scratch buffers for one forward/backward pass. Reuse across calls on the
// same thread; never share between threads.
struct MlpWorkspace {
  std::vector<std::vector<double>> act;  // act[0] = input, act[L] = output
  std::vector<double> delta, delta_prev;
};

// Forward pass; activations are kept in `ws` for subsequent backward calls.
void mlp_forward(const MlpParams& p, std::span<const double> x, MlpWorkspace& ws);

// Accumulates scale * (d output / d params)^T * dout into grad, using the
// activations left in `ws` by the last mlp_forward on the same input. May be
// called repeatedly with different dout for one forward pass.
void mlp_backward(const MlpParams& p, MlpWorkspace& ws,
                  std::span<const double> dout, double scale,
                  std::span<double> grad);

// Softmax policy head over the action space.
struct PolicyNet {
  MlpParams params;
};

// Scalar-output critic.
struct CriticNet {
  MlpParams params;
};

// Architectures follow the observation kind: o0/o1 use a single linear
// layer, oN uses two rectified-linear hidden layers of width 18.
PolicyNet make_policy_net(const ModelSpec& m, const ObservationModel& obs,
                          std::uint64_t seed);
CriticNet make_critic_net(const ModelSpec& m, const ObservationModel& obs,
                          std::uint64_t seed);

// Action distribution for one feature vector. Output sums to one and has no
// exact zeros for finite parameters.
void policy_forward(const PolicyNet& net, std::span<const double> x,
                    std::span<double> probs, MlpWorkspace& ws);

// log pi(j | x) and, when grad is nonempty, scale * d log pi(j|x) / d theta
// accumulated into grad.
double policy_logprob_grad(const PolicyNet& net, std::span<const double> x,
                           int j, double scale, std::span<double> grad,
                           MlpWorkspace& ws);

double critic_forward(const CriticNet& net, std::span<const double> x,
                      MlpWorkspace& ws);

// Accumulates scale * d f(x) / d w into grad.
void critic_grad(const CriticNet& net, std::span<const double> x, double scale,
                 std::span<double> grad, MlpWorkspace& ws);

struct AdamState {
  std::vector<double> m, v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(int param_count)
      : m(param_count, 0.0), v(param_count, 0.0) {}
};

// One Adam update with bias correction. Throws NumericError on a non-finite
// gradient before touching any state.
void adam_step(MlpParams& params, AdamState& state,
               std::span<const double> grad, double lr);

// Returns the global L2 norm before clipping; rescales g in place when the
// norm exceeds max_norm.
double clip_global_norm(std::span<double> g, double max_norm);

// Running mean/std of regression targets with exponential decay, used to
// keep critic targets in a trainable range across reward scales.
struct TargetScaler {
  double decay = 0.999;
  double m1 = 0.0;
  double m2 = 0.0;
  bool initialized = false;

  static constexpr double kStdFloor = 1e-4;

  void update(double x);
  double stddev() const;
  double normalize(double x) const { return (x - m1) / stddev(); }
  double unscale(double y) const { return y * stddev() + m1; }
};

// Updates the scaler with every raw target (in order), then normalizes the
// whole batch with the final statistics.
std::vector<double> scale_targets(TargetScaler& scaler,
                                  std::span<const double> raw);

// Everything needed to resume or evaluate a trained pair of networks.
struct Checkpoint {
  ObsKind obs = ObsKind::o1;
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::int64_t population = 0;
  PolicyNet policy;
  CriticNet critic;
};

// JSON checkpoint; doubles round-trip bit-exactly.
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace countac
