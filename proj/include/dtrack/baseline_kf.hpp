#pragma once

#include <vector>

#include "dtrack/dynamics.hpp"
#include "dtrack/scenario.hpp"
#include "dtrack/types.hpp"

namespace dtrack {

struct KalmanState {
  Vec6 estimate = Vec6::Zero();
  Mat6 covariance = Mat6::Identity();
};

// standard predict-update over stacked rows; innovation covariance handled
// with a symmetric solve
KalmanState kf_step(const KalmanState& state, const NcvModel& model, const MatX& H,
                    const MatX& R, const VecX& y);

enum class PositionSource { truth, estimated };

struct KfRunResult {
  MatX errors;                    // steps x 6, truth minus estimate
  std::vector<double> mse;        // per step, averaged over the 6 states
  double steady_state_mse = 0.0;  // mean over the final quartile
  bool diverged = false;
};

// centralized baselines fusing all nodes' measurements in one filter; used to
// compare the two measurement models on identical noise
KfRunResult kf_linear_tdoa_run(const Scenario& scenario, const BuiltScenario& built,
                               std::uint64_t trial_seed);
KfRunResult kf_nonlinear_tdoa_run(const Scenario& scenario, const BuiltScenario& built,
                                  std::uint64_t trial_seed, PositionSource source);

}  // namespace dtrack
