#include "countac/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace countac {

int ModelSpec::max_neighbors() const {
  std::size_t m = 0;
  for (const auto& nb : neighborhood) m = std::max(m, nb.size());
  return static_cast<int>(m);
}

void ModelSpec::validate() const {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("model: empty state or action space");
  if (horizon < 1) throw std::invalid_argument("model: horizon must be >= 1");
  if (population < 1)
    throw std::invalid_argument("model: population must be >= 1");
  if (static_cast<int>(initial_dist.size()) != num_states)
    throw std::invalid_argument("model: initial_dist size mismatch");

  double sum = 0.0;
  for (double p : initial_dist) {
    if (p < 0.0) throw std::invalid_argument("model: negative initial weight");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("model: initial_dist does not sum to 1");

  if (!neighborhood.empty()) {
    if (static_cast<int>(neighborhood.size()) != num_states)
      throw std::invalid_argument("model: neighborhood size mismatch");
    for (const auto& nb : neighborhood) {
      std::set<int> seen;
      for (int s : nb) {
        if (s < 0 || s >= num_states)
          throw std::invalid_argument("model: neighbor index out of range");
        if (!seen.insert(s).second)
          throw std::invalid_argument("model: duplicate neighbor entry");
      }
    }
  }
  if (!transition || !reward)
    throw std::invalid_argument("model: missing transition or reward callback");
  if (extra_obs_dim > 0 && !extra_obs)
    throw std::invalid_argument("model: extra_obs_dim set without callback");
}

ObsKind obs_kind_from_string(const std::string& s) {
  if (s == "o0") return ObsKind::o0;
  if (s == "o1") return ObsKind::o1;
  if (s == "oN") return ObsKind::oN;
  throw std::invalid_argument("unknown observation kind: " + s);
}

std::string to_string(ObsKind k) {
  switch (k) {
    case ObsKind::o0: return "o0";
    case ObsKind::o1: return "o1";
    case ObsKind::oN: return "oN";
  }
  return "?";
}

int ObservationModel::count_dim(const ModelSpec& m) const {
  switch (kind) {
    case ObsKind::o0: return 0;
    case ObsKind::o1: return 1;
    case ObsKind::oN: return 1 + m.max_neighbors();
  }
  return 0;
}

int ObservationModel::extra_dim(const ModelSpec& m) const {
  return kind == ObsKind::oN ? m.extra_obs_dim : 0;
}

std::vector<Violation> validate_trajectory(const CountTrajectory& traj,
                                           const ModelSpec& model) {
  std::vector<Violation> out;
  const int S = model.num_states;
  const int A = model.num_actions;
  const int H = model.horizon;

  if (static_cast<int>(traj.steps.size()) != H) {
    out.push_back({"horizon length", static_cast<int>(traj.steps.size()), -1, -1});
    return out;
  }

  for (int t = 0; t < H; ++t) {
    const CountStep& step = traj.steps[t];
    if (static_cast<int>(step.n_s.size()) != S ||
        static_cast<int>(step.n_sa.size()) != S * A) {
      out.push_back({"table shape", t, -1, -1});
      return out;
    }

    std::int64_t total = 0;
    bool negative = false;
    for (std::int64_t v : step.n_s) {
      total += v;
      negative = negative || v < 0;
    }
    if (negative || total != model.population)
      out.push_back({"population sum", t, -1, -1});

    for (int i = 0; i < S; ++i) {
      std::int64_t row = 0;
      for (int j = 0; j < A; ++j) {
        const std::int64_t v = step.sa(i, j, A);
        if (v < 0) out.push_back({"negative count", t, i, j});
        row += v;
      }
      if (row != step.n_s[i]) out.push_back({"action marginal", t, i, -1});
    }

    const bool wants_sas = t + 1 < H;
    if (!step.n_sas.empty()) {
      if (static_cast<int>(step.n_sas.size()) != S * A * S) {
        out.push_back({"table shape", t, -1, -1});
        return out;
      }
      for (int i = 0; i < S; ++i) {
        for (int j = 0; j < A; ++j) {
          std::int64_t row = 0;
          for (int k = 0; k < S; ++k) row += step.sas(i, j, k, A, S);
          if (row != step.sa(i, j, A))
            out.push_back({"transition marginal", t, i, j});
        }
      }
    } else if (wants_sas) {
      out.push_back({"missing transition table", t, -1, -1});
    }

    if (wants_sas && !step.n_sas.empty()) {
      const CountStep& next = traj.steps[t + 1];
      for (int k = 0; k < S; ++k) {
        std::int64_t inflow = 0;
        for (int i = 0; i < S; ++i)
          for (int j = 0; j < A; ++j) inflow += step.sas(i, j, k, A, S);
        if (static_cast<int>(next.n_s.size()) == S && inflow != next.n_s[k])
          out.push_back({"flow conservation", t + 1, k, -1});
      }
    }
  }
  return out;
}

namespace {

// Shared obs-feature block: [own count | neighbor counts (padded) | extras],
// everything divided by M.
void fill_obs_block(const ModelSpec& model, const ObservationModel& obs, int i,
                    const StateCounts& n_s, int t, std::span<double> out) {
  const double inv_m = 1.0 / static_cast<double>(model.population);
  std::size_t pos = 0;
  if (obs.kind == ObsKind::o1 || obs.kind == ObsKind::oN)
    out[pos++] = static_cast<double>(n_s[i]) * inv_m;
  if (obs.kind == ObsKind::oN) {
    const int max_nb = model.max_neighbors();
    const auto& nb = model.neighborhood.empty() ? std::vector<int>{}
                                                : model.neighborhood[i];
    for (int k = 0; k < max_nb; ++k)
      out[pos++] = k < static_cast<int>(nb.size())
                       ? static_cast<double>(n_s[nb[k]]) * inv_m
                       : 0.0;
    if (model.extra_obs_dim > 0) {
      model.extra_obs(t, i, n_s, out.subspan(pos, model.extra_obs_dim));
      pos += model.extra_obs_dim;
    }
  }
}

}  // namespace

void policy_features(const ModelSpec& model, const ObservationModel& obs, int i,
                     const StateCounts& n_s, int t, std::span<double> out) {
  if (i < 0 || i >= model.num_states)
    throw std::invalid_argument("policy_features: state index out of range");
  const int S = model.num_states;
  const int od = obs.obs_dim(model);
  std::fill(out.begin(), out.begin() + S, 0.0);
  out[i] = 1.0;
  fill_obs_block(model, obs, i, n_s, t, out.subspan(S, od));
  out[S + od] = static_cast<double>(t) / static_cast<double>(model.horizon);
}

void critic_features(const ModelSpec& model, const ObservationModel& obs, int i,
                     int j, const StateCounts& n_s, int t,
                     std::span<double> out) {
  if (i < 0 || i >= model.num_states || j < 0 || j >= model.num_actions)
    throw std::invalid_argument("critic_features: index out of range");
  const int S = model.num_states;
  const int A = model.num_actions;
  const int od = obs.obs_dim(model);
  std::fill(out.begin(), out.begin() + S + A, 0.0);
  out[i] = 1.0;
  out[S + j] = 1.0;
  fill_obs_block(model, obs, i, n_s, t, out.subspan(S + A, od));
  out[S + A + od] =
      static_cast<double>(t) / static_cast<double>(model.horizon);
}

std::vector<double> observe(const ModelSpec& model, const ObservationModel& obs,
                            int i, const StateCounts& n_s, int t) {
  std::vector<double> out(obs.policy_input_dim(model));
  policy_features(model, obs, i, n_s, t, out);
  return out;
}

ModelSpec load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("model file " + path + ": " + e.what());
  }

  ModelSpec m;
  try {
    m.num_states = doc.at("num_states").get<int>();
    m.num_actions = doc.at("num_actions").get<int>();
    m.horizon = doc.at("horizon").get<int>();
    m.population = doc.at("population").get<std::int64_t>();
    m.initial_dist = doc.at("initial_dist").get<std::vector<double>>();
    if (doc.contains("neighborhoods"))
      m.neighborhood =
          doc.at("neighborhoods").get<std::vector<std::vector<int>>>();

    const auto& dom = doc.at("domain");
    // Tabular dynamics: transition[i][j] is a distribution over successors,
    // reward[i][j] a scalar. Counts do not enter; this is the generic format
    // for externally supplied models.
    auto trans =
        dom.at("transition").get<std::vector<std::vector<std::vector<double>>>>();
    auto rew = dom.at("reward").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(trans.size()) != m.num_states ||
        static_cast<int>(rew.size()) != m.num_states)
      throw std::runtime_error("tabular blocks do not match num_states");
    for (int i = 0; i < m.num_states; ++i) {
      if (static_cast<int>(trans[i].size()) != m.num_actions ||
          static_cast<int>(rew[i].size()) != m.num_actions)
        throw std::runtime_error("tabular blocks do not match num_actions");
      for (int j = 0; j < m.num_actions; ++j)
        if (static_cast<int>(trans[i][j].size()) != m.num_states)
          throw std::runtime_error("transition row has wrong length");
    }
    m.transition = [trans](int, int i, int j, const CountTables&,
                           std::span<double> out) {
      const auto& row = trans[i][j];
      std::copy(row.begin(), row.end(), out.begin());
    };
    m.reward = [rew](int, int i, int j, const CountTables&) {
      return rew[i][j];
    };
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("model file " + path + ": " + e.what());
  }
  m.validate();
  return m;
}

}  // namespace countac
