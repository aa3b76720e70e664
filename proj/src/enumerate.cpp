#include "countac/enumerate.hpp"

#include <stdexcept>
#include <vector>

namespace countac {

namespace {

void compositions_rec(std::int64_t rem, int pos, std::vector<std::int64_t>& buf,
                      const std::function<void(std::span<const std::int64_t>)>& visit) {
  const int k = static_cast<int>(buf.size());
  if (pos == k - 1) {
    buf[pos] = rem;
    visit(buf);
    return;
  }
  for (std::int64_t c = 0; c <= rem; ++c) {
    buf[pos] = c;
    compositions_rec(rem - c, pos + 1, buf, visit);
  }
}

struct Enumerator {
  const ModelSpec& model;
  const std::function<void(const CountTrajectory&)>& visit;
  std::uint64_t limit;
  std::uint64_t visited = 0;
  CountTrajectory traj;

  Enumerator(const ModelSpec& m,
             const std::function<void(const CountTrajectory&)>& v,
             std::uint64_t lim)
      : model(m), visit(v), limit(lim) {
    traj.steps.resize(m.horizon);
  }

  void emit() {
    if (++visited > limit)
      throw std::length_error("enumerate_count_trajectories: over limit");
    visit(traj);
  }

  // Splits n_t(i) over actions for states i >= si, then recurses into the
  // successor split (or emits at the final step).
  void action_split(int t, int si) {
    const int S = model.num_states;
    const int A = model.num_actions;
    CountStep& step = traj.steps[t];
    if (si == S) {
      if (t + 1 == static_cast<int>(traj.steps.size())) {
        step.n_sas.clear();
        emit();
      } else {
        step.n_sas.assign(static_cast<std::size_t>(S) * A * S, 0);
        successor_split(t, 0);
      }
      return;
    }
    auto dst = std::span<std::int64_t>(
        step.n_sa.data() + static_cast<std::size_t>(si) * A, A);
    std::vector<std::int64_t> buf(A);
    compositions_rec(step.n_s[si], 0, buf,
                     [&](std::span<const std::int64_t> c) {
                       std::copy(c.begin(), c.end(), dst.begin());
                       action_split(t, si + 1);
                     });
  }

  // Splits n_t(i, j) over successors for flattened cells >= cell.
  void successor_split(int t, int cell) {
    const int S = model.num_states;
    const int A = model.num_actions;
    CountStep& step = traj.steps[t];
    if (cell == S * A) {
      CountStep& next = traj.steps[t + 1];
      next.n_s.assign(S, 0);
      for (int k = 0; k < S; ++k) {
        std::int64_t inflow = 0;
        for (int c = 0; c < S * A; ++c)
          inflow += step.n_sas[static_cast<std::size_t>(c) * S + k];
        next.n_s[k] = inflow;
      }
      next.n_sa.assign(static_cast<std::size_t>(S) * A, 0);
      action_split(t + 1, 0);
      return;
    }
    auto dst = std::span<std::int64_t>(
        step.n_sas.data() + static_cast<std::size_t>(cell) * S, S);
    std::vector<std::int64_t> buf(S);
    compositions_rec(step.n_sa[cell], 0, buf,
                     [&](std::span<const std::int64_t> c) {
                       std::copy(c.begin(), c.end(), dst.begin());
                       successor_split(t, cell + 1);
                     });
  }

  void run() {
    const int S = model.num_states;
    const int A = model.num_actions;
    CountStep& first = traj.steps[0];
    first.n_s.assign(S, 0);
    first.n_sa.assign(static_cast<std::size_t>(S) * A, 0);
    std::vector<std::int64_t> buf(S);
    compositions_rec(model.population, 0, buf,
                     [&](std::span<const std::int64_t> c) {
                       std::copy(c.begin(), c.end(), first.n_s.begin());
                       action_split(0, 0);
                     });
  }
};

}  // namespace

void for_each_composition(
    std::int64_t n, int k,
    const std::function<void(std::span<const std::int64_t>)>& visit) {
  if (k < 1) throw std::invalid_argument("for_each_composition: k must be >= 1");
  std::vector<std::int64_t> buf(k);
  compositions_rec(n, 0, buf, visit);
}

void enumerate_count_trajectories(
    const ModelSpec& model,
    const std::function<void(const CountTrajectory&)>& visit,
    std::uint64_t limit) {
  Enumerator e(model, visit, limit);
  e.run();
}

}  // namespace countac
