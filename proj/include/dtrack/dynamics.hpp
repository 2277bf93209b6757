#pragma once

#include <vector>

#include "dtrack/rng.hpp"
#include "dtrack/types.hpp"

namespace dtrack {

// state x = [position; velocity], constant-velocity kinematics with
// acceleration-level process noise entering through G
struct NcvModel {
  double T = 1.0;
  Mat3 Q = Mat3::Zero();
  Mat6 F = Mat6::Identity();
  Mat63 G = Mat63::Zero();
};

using TargetState = Vec6;

NcvModel build_ncv(double T, const Mat3& Q);

TargetState step_target(const NcvModel& model, const TargetState& x, const Vec3& q);

Vec3 sample_process_noise(const Mat3& Q, Rng& rng);

// integer matrix power, p >= 0
MatX matrix_power(const MatX& m, int p);

// deterministic piecewise-constant acceleration script, for noise-free runs
struct ManeuverSegment {
  int from_step = 0;
  Vec3 accel = Vec3::Zero();
};

Vec3 scripted_accel(const std::vector<ManeuverSegment>& script, int k);

}  // namespace dtrack
