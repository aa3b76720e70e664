#include "countac/nets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "countac/rng.hpp"

namespace countac {

std::size_t MlpParams::weight_offset(int layer) const {
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l)
    off += static_cast<std::size_t>(layer_sizes[l + 1]) * layer_sizes[l] +
           layer_sizes[l + 1];
  return off;
}

std::size_t MlpParams::bias_offset(int layer) const {
  return weight_offset(layer) +
         static_cast<std::size_t>(layer_sizes[layer + 1]) * layer_sizes[layer];
}

MlpParams MlpParams::zeros(std::vector<int> sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp: need >= 2 layers");
  MlpParams p;
  p.layer_sizes = std::move(sizes);
  std::size_t n = 0;
  for (int l = 0; l + 1 < static_cast<int>(p.layer_sizes.size()); ++l)
    n += static_cast<std::size_t>(p.layer_sizes[l + 1]) * p.layer_sizes[l] +
         p.layer_sizes[l + 1];
  p.flat.assign(n, 0.0);
  return p;
}

MlpParams MlpParams::glorot(std::vector<int> sizes, std::uint64_t seed) {
  MlpParams p = zeros(std::move(sizes));
  Rng rng(seed);
  for (int l = 0; l < p.num_layers(); ++l) {
    const int fan_in = p.layer_sizes[l];
    const int fan_out = p.layer_sizes[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    double* w = p.flat.data() + p.weight_offset(l);
    for (int k = 0; k < fan_out * fan_in; ++k)
      w[k] = (2.0 * rng.u01() - 1.0) * a;
    // biases stay zero
  }
  return p;
}

void mlp_forward(const MlpParams& p, std::span<const double> x,
                 MlpWorkspace& ws) {
  const int L = p.num_layers();
  if (static_cast<int>(x.size()) != p.input_dim())
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  ws.act.resize(L + 1);
  ws.act[0].assign(x.begin(), x.end());
  for (int l = 0; l < L; ++l) {
    const int in = p.layer_sizes[l];
    const int out = p.layer_sizes[l + 1];
    const double* w = p.flat.data() + p.weight_offset(l);
    const double* b = p.flat.data() + p.bias_offset(l);
    ws.act[l + 1].resize(out);
    const double* src = ws.act[l].data();
    double* dst = ws.act[l + 1].data();
    for (int r = 0; r < out; ++r) {
      double acc = b[r];
      const double* row = w + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) acc += row[c] * src[c];
      dst[r] = (l + 1 < L && acc < 0.0) ? 0.0 : acc;  // relu on hidden layers
    }
  }
}

void mlp_backward(const MlpParams& p, MlpWorkspace& ws,
                  std::span<const double> dout, double scale,
                  std::span<double> grad) {
  const int L = p.num_layers();
  ws.delta.assign(dout.begin(), dout.end());
  for (int l = L - 1; l >= 0; --l) {
    const int in = p.layer_sizes[l];
    const int out = p.layer_sizes[l + 1];
    const double* w = p.flat.data() + p.weight_offset(l);
    double* gw = grad.data() + p.weight_offset(l);
    double* gb = grad.data() + p.bias_offset(l);
    const double* a = ws.act[l].data();

    for (int r = 0; r < out; ++r) {
      const double d = ws.delta[r] * scale;
      if (d != 0.0) {
        double* grow = gw + static_cast<std::size_t>(r) * in;
        for (int c = 0; c < in; ++c) grow[c] += d * a[c];
        gb[r] += d;
      }
    }
    if (l == 0) break;

    ws.delta_prev.assign(in, 0.0);
    for (int r = 0; r < out; ++r) {
      const double d = ws.delta[r];
      if (d == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) ws.delta_prev[c] += d * row[c];
    }
    // relu mask: activation zero means the unit was off (or exactly at the
    // kink, where we take the subgradient 0).
    for (int c = 0; c < in; ++c)
      if (a[c] <= 0.0) ws.delta_prev[c] = 0.0;
    std::swap(ws.delta, ws.delta_prev);
  }
}

namespace {

std::vector<int> arch_for(const ObservationModel& obs, int in, int out) {
  if (obs.kind == ObsKind::oN) return {in, 18, 18, out};
  return {in, out};
}

}  // namespace

PolicyNet make_policy_net(const ModelSpec& m, const ObservationModel& obs,
                          std::uint64_t seed) {
  return PolicyNet{
      MlpParams::glorot(arch_for(obs, obs.policy_input_dim(m), m.num_actions),
                        seed)};
}

CriticNet make_critic_net(const ModelSpec& m, const ObservationModel& obs,
                          std::uint64_t seed) {
  return CriticNet{
      MlpParams::glorot(arch_for(obs, obs.critic_input_dim(m), 1), seed)};
}

void policy_forward(const PolicyNet& net, std::span<const double> x,
                    std::span<double> probs, MlpWorkspace& ws) {
  mlp_forward(net.params, x, ws);
  const auto& logits = ws.act.back();
  const int A = static_cast<int>(logits.size());
  if (static_cast<int>(probs.size()) != A)
    throw std::invalid_argument("policy_forward: output size mismatch");
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double z = 0.0;
  for (int j = 0; j < A; ++j) {
    probs[j] = std::exp(logits[j] - mx);
    z += probs[j];
  }
  for (int j = 0; j < A; ++j) probs[j] /= z;
}

double policy_logprob_grad(const PolicyNet& net, std::span<const double> x,
                           int j, double scale, std::span<double> grad,
                           MlpWorkspace& ws) {
  const int A = net.params.output_dim();
  if (j < 0 || j >= A)
    throw std::invalid_argument("policy_logprob_grad: bad action index");
  mlp_forward(net.params, x, ws);
  const auto& logits = ws.act.back();
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double z = 0.0;
  for (int k = 0; k < A; ++k) z += std::exp(logits[k] - mx);
  const double logprob = logits[j] - mx - std::log(z);

  if (!grad.empty()) {
    std::vector<double> dlogits(A);
    for (int k = 0; k < A; ++k)
      dlogits[k] = (k == j ? 1.0 : 0.0) - std::exp(logits[k] - mx) / z;
    mlp_backward(net.params, ws, dlogits, scale, grad);
  }
  return logprob;
}

double critic_forward(const CriticNet& net, std::span<const double> x,
                      MlpWorkspace& ws) {
  mlp_forward(net.params, x, ws);
  return ws.act.back()[0];
}

void critic_grad(const CriticNet& net, std::span<const double> x, double scale,
                 std::span<double> grad, MlpWorkspace& ws) {
  mlp_forward(net.params, x, ws);
  const double one = 1.0;
  mlp_backward(net.params, ws, std::span<const double>(&one, 1), scale, grad);
}

void adam_step(MlpParams& params, AdamState& state,
               std::span<const double> grad, double lr) {
  if (grad.size() != params.flat.size() || state.m.size() != params.flat.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  for (double g : grad)
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < grad.size(); ++k) {
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * grad[k];
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * grad[k] * grad[k];
    const double mhat = state.m[k] / bc1;
    const double vhat = state.v[k] / bc2;
    params.flat[k] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

double clip_global_norm(std::span<double> g, double max_norm) {
  double sq = 0.0;
  for (double v : g) sq += v * v;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (double& v : g) v *= s;
  }
  return norm;
}

void TargetScaler::update(double x) {
  if (!initialized) {
    m1 = x;
    m2 = x * x;
    initialized = true;
    return;
  }
  m1 = decay * m1 + (1.0 - decay) * x;
  m2 = decay * m2 + (1.0 - decay) * x * x;
}

double TargetScaler::stddev() const {
  return std::sqrt(std::max(m2 - m1 * m1, kStdFloor * kStdFloor));
}

std::vector<double> scale_targets(TargetScaler& scaler,
                                  std::span<const double> raw) {
  for (double x : raw) scaler.update(x);
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) out[k] = scaler.normalize(raw[k]);
  return out;
}

namespace {

nlohmann::json mlp_to_json(const MlpParams& p) {
  return {{"layer_sizes", p.layer_sizes}, {"values", p.flat}};
}

MlpParams mlp_from_json(const nlohmann::json& j) {
  MlpParams p = MlpParams::zeros(j.at("layer_sizes").get<std::vector<int>>());
  auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != p.flat.size())
    throw std::runtime_error("checkpoint: parameter count mismatch");
  p.flat = std::move(values);
  return p;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  for (double v : ck.policy.params.flat)
    if (!std::isfinite(v)) throw NumericError("checkpoint: non-finite policy");
  for (double v : ck.critic.params.flat)
    if (!std::isfinite(v)) throw NumericError("checkpoint: non-finite critic");

  nlohmann::json doc{{"version", 1},
                     {"obs", to_string(ck.obs)},
                     {"num_states", ck.num_states},
                     {"num_actions", ck.num_actions},
                     {"horizon", ck.horizon},
                     {"population", ck.population},
                     {"policy", mlp_to_json(ck.policy.params)},
                     {"critic", mlp_to_json(ck.critic.params)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << doc.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
    if (doc.at("version").get<int>() != 1)
      throw std::runtime_error("unsupported checkpoint version");
    Checkpoint ck;
    ck.obs = obs_kind_from_string(doc.at("obs").get<std::string>());
    ck.num_states = doc.at("num_states").get<int>();
    ck.num_actions = doc.at("num_actions").get<int>();
    ck.horizon = doc.at("horizon").get<int>();
    ck.population = doc.at("population").get<std::int64_t>();
    ck.policy.params = mlp_from_json(doc.at("policy"));
    ck.critic.params = mlp_from_json(doc.at("critic"));
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint " + path + ": " + e.what());
  }
}

}  // namespace countac
