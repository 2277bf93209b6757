#pragma once

#include <tuple>
#include <vector>

#include "dtrack/dynamics.hpp"
#include "dtrack/rng.hpp"
#include "dtrack/sensor_network.hpp"
#include "dtrack/types.hpp"

namespace dtrack {

// fixed integer step delays per directed link; tau(i, j) is the age of node j's
// estimate when node i consumes it.  zero on the diagonal and off-graph pairs.
struct DelayProfile {
  int tau_bar = 0;
  MatXi tau;
};

enum class DelayScheme { constant, uniform_random, per_link_list };

// per_link entries are (i, j, delay) for directed pairs; unlisted links get 0
DelayProfile assign_delays(const SensorNetwork& net, DelayScheme scheme, int tau_bar, Rng& rng,
                           const std::vector<std::tuple<int, int, int>>& per_link = {});

// 1 iff node i consumes node j's estimate at age r under this profile
int indicator(const SensorNetwork& net, const DelayProfile& profile, int i, int j, int r);

// delay-selected consensus slice: diagonal survives only at r = 0,
// edge (i, j) survives at r = tau_ij
MatX build_W_r(const SensorNetwork& net, const MatX& W, const DelayProfile& profile, int r);

// consensus-only augmented matrix: top block row [W_0 ... W_tau_bar],
// identities on the first sub-diagonal
MatX build_augmented_W(const SensorNetwork& net, const MatX& W, const DelayProfile& profile);

struct AugmentedSystem {
  int N = 0;
  int n = kStateDim;
  int tau_bar = 0;
  MatX WF_bar;  // N*n*(tau_bar+1) square
};

// prediction operator of the delay-free rewrite: top block row
// [W_0 (x) F, W_1 (x) F^2, ..., W_tau (x) F^{tau+1}], identities below
AugmentedSystem build_augmented_WF(const SensorNetwork& net, const MatX& W, const Mat6& F,
                                   const DelayProfile& profile);

}  // namespace dtrack
