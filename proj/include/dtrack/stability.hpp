#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dtrack/delay_model.hpp"
#include "dtrack/tdoa.hpp"
#include "dtrack/types.hpp"

namespace dtrack {

double spectral_radius(const MatX& m);

struct ObservabilityReport {
  int rank = 0;
  int dim = 0;
  bool observable = false;
  bool detectable = false;  // PBH at every eigenvalue with |lambda| >= 1
};

// pair (W (x) F, blockdiag(H_i^T H_i)); network-wide property, weaker than
// per-node observability
ObservabilityReport check_distributed_observability(const MatX& W, const Mat6& F,
                                                    const MatX& dh_bar);

struct GainSet {
  std::vector<Mat6> K;
};

MatX big_k(const GainSet& gains);

struct GainSearchOptions {
  double alpha = 1.0;    // position-block injection scale
  double beta = 0.02;    // velocity-block injection scale
  int budget = 2000;     // accepted-or-rejected perturbation evaluations
  double margin = 0.005; // stop once rho < 1 - margin
  std::uint64_t seed = 1;
};

// local least-squares output-injection init, then seeded randomized coordinate
// descent on the delay-free closed-loop radius; requires a detectable pair
GainSet design_gains(const MatX& W, const Mat6& F, const LinearTdoaModel& model,
                     const GainSearchOptions& opts = {});

struct ClosedLoop {
  MatX A;
  double rho = 0.0;
};

// delay-free: (I - K Dbar_H) (W (x) F)
ClosedLoop build_closed_loop(const MatX& W, const Mat6& F, const GainSet& gains,
                             const MatX& dh_bar);

// delayed: corrections act on the first block row of WF_bar
ClosedLoop build_closed_loop(const SensorNetwork& net, const MatX& W, const Mat6& F,
                             const GainSet& gains, const MatX& dh_bar,
                             const DelayProfile& profile);

// largest tau* <= cap such that (I - K Dbar_H)(W (x) F^{tau+1}) is Schur for
// every tau <= tau*; nullopt if already unstable at tau = 0
std::optional<int> max_delay_bound(const MatX& W, const Mat6& F, const GainSet& gains,
                                   const MatX& dh_bar, int cap = 20);

}  // namespace dtrack
