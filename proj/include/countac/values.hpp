#pragma once

#include <cstdint>
#include <vector>

#include "countac/model.hpp"

namespace countac {

// Count-ratio estimates of the policy and transition kernel realized by one
// trajectory. Rows with zero-count denominators are flagged undefined and
// stored as zeros.
struct EmpiricalFlow {
  int H = 0, S = 0, A = 0;
  std::vector<double> phi;       // (H-1) x S x A x S
  std::vector<std::uint8_t> phi_defined;  // (H-1) x S x A
  std::vector<double> pi;        // H x S x A
  std::vector<std::uint8_t> pi_defined;   // H x S

  double phi_at(int t, int i, int j, int k) const {
    return phi[((static_cast<std::size_t>(t) * S + i) * A + j) * S + k];
  }
  bool phi_def(int t, int i, int j) const {
    return phi_defined[(static_cast<std::size_t>(t) * S + i) * A + j] != 0;
  }
  double pi_at(int t, int i, int j) const {
    return pi[(static_cast<std::size_t>(t) * S + i) * A + j];
  }
  bool pi_def(int t, int i) const {
    return pi_defined[static_cast<std::size_t>(t) * S + i] != 0;
  }
};

EmpiricalFlow empirical_flow(const CountTrajectory& traj, const ModelSpec& model);

// Expected tail reward for an agent at (i, j) at time t, conditional on the
// sampled counts. Entries without support (zero count) are undefined and
// zero-filled; every consumer weights by the count, which is zero exactly
// there.
struct IndividualValueTable {
  int H = 0, S = 0, A = 0;
  std::vector<double> v;                  // H x S x A
  std::vector<std::uint8_t> defined_mask;  // H x S x A

  double at(int t, int i, int j) const {
    return v[(static_cast<std::size_t>(t) * S + i) * A + j];
  }
  bool defined(int t, int i, int j) const {
    return defined_mask[(static_cast<std::size_t>(t) * S + i) * A + j] != 0;
  }
};

// Backward dynamic program over the empirical flow ratios:
//   V_{H-1}(i,j) = r_{H-1}(i,j,n)
//   V_t(i,j)     = r_t(i,j,n) + sum_{i',j'} phi_t(i'|i,j) pi_{t+1}(j'|i') V_{t+1}(i',j')
// The count-weighted sum of the table at any t reproduces the empirical
// return from t exactly.
IndividualValueTable individual_values(const CountTrajectory& traj,
                                       const ModelSpec& model);

}  // namespace countac
