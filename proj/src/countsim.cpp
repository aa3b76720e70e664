#include "countac/countsim.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "countac/batch.hpp"

namespace countac {

namespace {

constexpr std::int64_t kOracleAgentGuard = 10000;

// log k! for k = 0..n via lgamma; one table per call site, built for M.
std::vector<double> log_factorials(std::int64_t n) {
  std::vector<double> lf(static_cast<std::size_t>(n) + 1);
  for (std::int64_t k = 0; k <= n; ++k)
    lf[static_cast<std::size_t>(k)] = std::lgamma(static_cast<double>(k) + 1.0);
  return lf;
}

}  // namespace

CountTrajectory sample_counts(const ModelSpec& model, const PolicyNet& policy,
                              const ObservationModel& obs, Rng& rng) {
  const int S = model.num_states;
  const int A = model.num_actions;
  const int H = model.horizon;

  CountTrajectory traj;
  traj.steps.resize(H);

  StateCounts n_s(S, 0);
  rng.multinomial(model.population, model.initial_dist, n_s);

  std::vector<double> feats(obs.policy_input_dim(model));
  std::vector<double> probs(A);
  std::vector<double> trans(S);
  MlpWorkspace ws;

  for (int t = 0; t < H; ++t) {
    CountStep& step = traj.steps[t];
    step.n_s = n_s;
    step.n_sa.assign(static_cast<std::size_t>(S) * A, 0);

    for (int i = 0; i < S; ++i) {
      if (n_s[i] == 0) continue;
      policy_features(model, obs, i, n_s, t, feats);
      policy_forward(policy, feats, probs, ws);
      rng.multinomial(n_s[i], probs,
                      std::span<std::int64_t>(
                          step.n_sa.data() + static_cast<std::size_t>(i) * A, A));
    }

    if (t + 1 == H) break;

    step.n_sas.assign(static_cast<std::size_t>(S) * A * S, 0);
    const CountTables tables = step.tables(A);
    StateCounts next(S, 0);
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < A; ++j) {
        const std::int64_t c = step.sa(i, j, A);
        if (c == 0) continue;
        model.transition(t, i, j, tables, trans);
        auto row = std::span<std::int64_t>(
            step.n_sas.data() + (static_cast<std::size_t>(i) * A + j) * S, S);
        rng.multinomial(c, trans, row);
        for (int k = 0; k < S; ++k) next[k] += row[k];
      }
    }
    n_s = std::move(next);
  }
  return traj;
}

std::pair<std::vector<AgentTrajectory>, CountTrajectory> sample_agents_oracle(
    const ModelSpec& model, const PolicyNet& policy, const ObservationModel& obs,
    Rng& rng) {
  if (model.population > kOracleAgentGuard)
    throw std::invalid_argument("sample_agents_oracle: population over guard");

  const int S = model.num_states;
  const int A = model.num_actions;
  const int H = model.horizon;
  const int M = static_cast<int>(model.population);

  std::vector<AgentTrajectory> agents(M);
  for (auto& a : agents) {
    a.states.reserve(H);
    a.actions.reserve(H);
  }

  CountTrajectory traj;
  traj.steps.resize(H);

  std::vector<int> cur(M);
  for (int m = 0; m < M; ++m) cur[m] = rng.categorical(model.initial_dist);

  std::vector<double> feats(obs.policy_input_dim(model));
  std::vector<std::vector<double>> probs_by_state(S);
  std::vector<double> trans(S);
  MlpWorkspace ws;

  for (int t = 0; t < H; ++t) {
    CountStep& step = traj.steps[t];
    step.n_s.assign(S, 0);
    for (int m = 0; m < M; ++m) ++step.n_s[cur[m]];

    for (int i = 0; i < S; ++i) {
      if (step.n_s[i] == 0) continue;
      policy_features(model, obs, i, step.n_s, t, feats);
      probs_by_state[i].resize(A);
      policy_forward(policy, feats, probs_by_state[i], ws);
    }

    step.n_sa.assign(static_cast<std::size_t>(S) * A, 0);
    std::vector<int> act(M);
    for (int m = 0; m < M; ++m) {
      act[m] = rng.categorical(probs_by_state[cur[m]]);
      agents[m].states.push_back(cur[m]);
      agents[m].actions.push_back(act[m]);
      ++step.n_sa[static_cast<std::size_t>(cur[m]) * A + act[m]];
    }

    if (t + 1 == H) break;

    step.n_sas.assign(static_cast<std::size_t>(S) * A * S, 0);
    const CountTables tables = step.tables(A);
    for (int m = 0; m < M; ++m) {
      model.transition(t, cur[m], act[m], tables, trans);
      const int nxt = rng.categorical(trans);
      ++step.n_sas[(static_cast<std::size_t>(cur[m]) * A + act[m]) * S + nxt];
      cur[m] = nxt;
    }
  }
  return {std::move(agents), std::move(traj)};
}

double count_log_prob(const CountTrajectory& traj, const ModelSpec& model,
                      const PolicyNet& policy, const ObservationModel& obs) {
  if (!validate_trajectory(traj, model).empty())
    throw std::invalid_argument("count_log_prob: inconsistent trajectory");

  const int S = model.num_states;
  const int A = model.num_actions;
  const int H = model.horizon;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  const auto lf = log_factorials(model.population);
  auto lfac = [&lf](std::int64_t k) { return lf[static_cast<std::size_t>(k)]; };

  // Multiplicity of ordered agent trajectories with these counts.
  double log_h = lfac(model.population);
  for (int i = 0; i < S; ++i) log_h -= lfac(traj.steps[0].n_s[i]);
  for (int t = 0; t + 1 < H; ++t) {
    const CountStep& step = traj.steps[t];
    for (int i = 0; i < S; ++i) {
      log_h += lfac(step.n_s[i]);
      for (int j = 0; j < A; ++j)
        for (int k = 0; k < S; ++k) log_h -= lfac(step.sas(i, j, k, A, S));
    }
  }
  {
    const CountStep& last = traj.steps[H - 1];
    for (int i = 0; i < S; ++i) {
      log_h += lfac(last.n_s[i]);
      for (int j = 0; j < A; ++j) log_h -= lfac(last.sa(i, j, A));
    }
  }

  // Probability of one ordering: initial placement, policy and transition
  // factors, each weighted by its count. Zero-count terms are skipped, so
  // 0 * log 0 never arises.
  double log_f = 0.0;
  std::vector<double> feats(obs.policy_input_dim(model));
  std::vector<double> probs(A);
  std::vector<double> trans(S);
  MlpWorkspace ws;

  for (int i = 0; i < S; ++i) {
    const std::int64_t c = traj.steps[0].n_s[i];
    if (c == 0) continue;
    if (model.initial_dist[i] <= 0.0) return neg_inf;
    log_f += static_cast<double>(c) * std::log(model.initial_dist[i]);
  }

  for (int t = 0; t < H; ++t) {
    const CountStep& step = traj.steps[t];
    for (int i = 0; i < S; ++i) {
      if (step.n_s[i] == 0) continue;
      policy_features(model, obs, i, step.n_s, t, feats);
      policy_forward(policy, feats, probs, ws);
      for (int j = 0; j < A; ++j) {
        const std::int64_t c = step.sa(i, j, A);
        if (c == 0) continue;
        if (probs[j] <= 0.0) return neg_inf;
        log_f += static_cast<double>(c) * std::log(probs[j]);
      }
    }
    if (t + 1 == H) break;

    const CountTables tables = step.tables(A);
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < A; ++j) {
        if (step.sa(i, j, A) == 0) continue;
        model.transition(t, i, j, tables, trans);
        for (int k = 0; k < S; ++k) {
          const std::int64_t c = step.sas(i, j, k, A, S);
          if (c == 0) continue;
          if (trans[k] <= 0.0) return neg_inf;
          log_f += static_cast<double>(c) * std::log(trans[k]);
        }
      }
    }
  }
  return log_h + log_f;
}

double empirical_return(const CountTrajectory& traj, const ModelSpec& model,
                        int t) {
  const int S = model.num_states;
  const int A = model.num_actions;
  const int H = model.horizon;
  if (t < 0 || t >= H)
    throw std::invalid_argument("empirical_return: time index out of range");

  double total = 0.0;
  for (int T = t; T < H; ++T) {
    const CountStep& step = traj.steps[T];
    const CountTables tables = step.tables(A);
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < A; ++j) {
        const std::int64_t c = step.sa(i, j, A);
        if (c == 0) continue;
        total += static_cast<double>(c) * model.reward(T, i, j, tables);
      }
    }
  }
  return total;
}

EvalResult evaluate_policy(const ModelSpec& model, const PolicyNet& policy,
                           const ObservationModel& obs, int K,
                           std::uint64_t seed, int workers) {
  if (K < 1) throw std::invalid_argument("evaluate_policy: K must be >= 1");
  const std::vector<double> returns =
      batch::rollout_returns(model, policy, obs, K, seed, workers);

  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= K;
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  EvalResult out;
  out.mean = mean;
  out.stderr_ = K > 1 ? std::sqrt(var / (K - 1) / K) : 0.0;
  out.samples = K;
  return out;
}

void save_trajectory(const std::string& path, const CountTrajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory: " + path);
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const CountStep& step = traj.steps[t];
    nlohmann::json rec{{"t", t}, {"n_s", step.n_s}, {"n_sa", step.n_sa}};
    if (!step.n_sas.empty()) rec["n_sas"] = step.n_sas;
    out << rec.dump() << '\n';
  }
}

CountTrajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory: " + path);
  CountTrajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line);
    CountStep step;
    step.n_s = rec.at("n_s").get<StateCounts>();
    step.n_sa = rec.at("n_sa").get<std::vector<std::int64_t>>();
    if (rec.contains("n_sas"))
      step.n_sas = rec.at("n_sas").get<std::vector<std::int64_t>>();
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

}  // namespace countac
