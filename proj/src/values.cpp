#include "countac/values.hpp"

#include <stdexcept>

namespace countac {

EmpiricalFlow empirical_flow(const CountTrajectory& traj,
                             const ModelSpec& model) {
  if (!validate_trajectory(traj, model).empty())
    throw std::invalid_argument("empirical_flow: inconsistent trajectory");

  const int S = model.num_states;
  const int A = model.num_actions;
  const int H = model.horizon;

  EmpiricalFlow f;
  f.H = H;
  f.S = S;
  f.A = A;
  f.pi.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  f.pi_defined.assign(static_cast<std::size_t>(H) * S, 0);
  if (H > 1) {
    f.phi.assign(static_cast<std::size_t>(H - 1) * S * A * S, 0.0);
    f.phi_defined.assign(static_cast<std::size_t>(H - 1) * S * A, 0);
  }

  for (int t = 0; t < H; ++t) {
    const CountStep& step = traj.steps[t];
    for (int i = 0; i < S; ++i) {
      if (step.n_s[i] == 0) continue;
      f.pi_defined[static_cast<std::size_t>(t) * S + i] = 1;
      const double inv = 1.0 / static_cast<double>(step.n_s[i]);
      for (int j = 0; j < A; ++j)
        f.pi[(static_cast<std::size_t>(t) * S + i) * A + j] =
            static_cast<double>(step.sa(i, j, A)) * inv;
    }
    if (t + 1 == H) break;
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < A; ++j) {
        const std::int64_t c = step.sa(i, j, A);
        if (c == 0) continue;
        f.phi_defined[(static_cast<std::size_t>(t) * S + i) * A + j] = 1;
        const double inv = 1.0 / static_cast<double>(c);
        for (int k = 0; k < S; ++k)
          f.phi[((static_cast<std::size_t>(t) * S + i) * A + j) * S + k] =
              static_cast<double>(step.sas(i, j, k, A, S)) * inv;
      }
    }
  }
  return f;
}

IndividualValueTable individual_values(const CountTrajectory& traj,
                                       const ModelSpec& model) {
  const EmpiricalFlow flow = empirical_flow(traj, model);
  const int S = model.num_states;
  const int A = model.num_actions;
  const int H = model.horizon;

  IndividualValueTable table;
  table.H = H;
  table.S = S;
  table.A = A;
  table.v.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  table.defined_mask.assign(static_cast<std::size_t>(H) * S * A, 0);

  auto idx = [S, A](int t, int i, int j) {
    return (static_cast<std::size_t>(t) * S + i) * A + j;
  };

  for (int t = H - 1; t >= 0; --t) {
    const CountStep& step = traj.steps[t];
    const CountTables tables = step.tables(A);
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < A; ++j) {
        if (step.sa(i, j, A) == 0) continue;
        double v = model.reward(t, i, j, tables);
        if (t + 1 < H) {
          for (int k = 0; k < S; ++k) {
            const double p_move = flow.phi_at(t, i, j, k);
            if (p_move == 0.0) continue;
            double tail = 0.0;
            for (int j2 = 0; j2 < A; ++j2) {
              const double p_act = flow.pi_at(t + 1, k, j2);
              if (p_act == 0.0) continue;
              tail += p_act * table.v[idx(t + 1, k, j2)];
            }
            v += p_move * tail;
          }
        }
        table.v[idx(t, i, j)] = v;
        table.defined_mask[idx(t, i, j)] = 1;
      }
    }
  }
  return table;
}

}  // namespace countac
