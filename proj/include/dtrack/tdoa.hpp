#pragma once

#include <vector>

#include "dtrack/rng.hpp"
#include "dtrack/sensor_network.hpp"
#include "dtrack/types.hpp"

namespace dtrack {

// measurement row for the squared-range-difference model: depends only on
// sensor geometry, zero on the velocity block
RowVec6 linear_row(const Vec3& p_i, const Vec3& p_j);

// known bias so that z = h x + b with h = linear_row
double linear_bias(const Vec3& p_i, const Vec3& p_j);

// raw measured value: half difference of squared ranges
double squared_range_diff(const Vec3& p, const Vec3& p_i, const Vec3& p_j);

// range difference and its position jacobian row (unit-vector difference)
double range_diff(const Vec3& p, const Vec3& p_i, const Vec3& p_j);
RowVec6 nonlinear_row(const Vec3& p_eval, const Vec3& p_i, const Vec3& p_j, double eps = 1e-9);

struct LinearTdoaModel {
  std::vector<MatX> H;      // per node, |N_i| x 6, time-invariant
  std::vector<VecX> bias;   // per node, |N_i|
};

LinearTdoaModel build_linear_model(const SensorNetwork& net);

// raw measurements z_i = squared_range_diff + noise (bias not removed)
VecX measure_linear(const LinearTdoaModel& model, const SensorNetwork& net, int i,
                    const Vec3& target, double r, Rng& rng);

// range-difference measurements for the nonlinear model
VecX measure_nonlinear(const SensorNetwork& net, int i, const Vec3& target, double r, Rng& rng);

// per-node jacobian stack at an evaluation point
MatX nonlinear_h(const SensorNetwork& net, int i, const Vec3& p_eval);

// block-diagonal stack of H_i (sum |N_i| rows by N*6 cols)
MatX build_dh(const LinearTdoaModel& model);

// block-diagonal H_i^T H_i, N*6 by N*6
MatX build_dh_bar(const LinearTdoaModel& model);

}  // namespace dtrack
