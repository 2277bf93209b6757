#include "dtrack/tdoa.hpp"

#include <stdexcept>
#include <string>

namespace dtrack {

RowVec6 linear_row(const Vec3& p_i, const Vec3& p_j) {
  if ((p_j - p_i).norm() <= 1e-6)
    throw std::invalid_argument("linear_row: coincident sensors");
  RowVec6 h = RowVec6::Zero();
  h.head<3>() = (p_j - p_i).transpose();
  return h;
}

double linear_bias(const Vec3& p_i, const Vec3& p_j) {
  return -0.5 * (p_j.squaredNorm() - p_i.squaredNorm());
}

double squared_range_diff(const Vec3& p, const Vec3& p_i, const Vec3& p_j) {
  return 0.5 * ((p - p_i).squaredNorm() - (p - p_j).squaredNorm());
}

double range_diff(const Vec3& p, const Vec3& p_i, const Vec3& p_j) {
  return (p - p_i).norm() - (p - p_j).norm();
}

RowVec6 nonlinear_row(const Vec3& p_eval, const Vec3& p_i, const Vec3& p_j, double eps) {
  double di = (p_eval - p_i).norm();
  double dj = (p_eval - p_j).norm();
  if (di <= eps || dj <= eps)
    throw std::runtime_error("nonlinear_row: singular geometry, target at a sensor");
  RowVec6 h = RowVec6::Zero();
  h.head<3>() = ((p_eval - p_i) / di - (p_eval - p_j) / dj).transpose();
  return h;
}

LinearTdoaModel build_linear_model(const SensorNetwork& net) {
  if (static_cast<int>(net.positions.size()) != net.N)
    throw std::invalid_argument("build_linear_model: sensors not placed");
  LinearTdoaModel model;
  model.H.resize(net.N);
  model.bias.resize(net.N);
  for (int i = 0; i < net.N; ++i) {
    const auto& nb = net.neighbors[i];
    model.H[i].resize(static_cast<int>(nb.size()), 6);
    model.bias[i].resize(static_cast<int>(nb.size()));
    for (size_t m = 0; m < nb.size(); ++m) {
      model.H[i].row(static_cast<int>(m)) = linear_row(net.positions[i], net.positions[nb[m]]);
      model.bias[i](static_cast<int>(m)) = linear_bias(net.positions[i], net.positions[nb[m]]);
    }
  }
  return model;
}

VecX measure_linear(const LinearTdoaModel& model, const SensorNetwork& net, int i,
                    const Vec3& target, double r, Rng& rng) {
  if (i < 0 || i >= net.N) throw std::invalid_argument("measure_linear: bad sensor index");
  const auto& nb = net.neighbors[i];
  VecX z(static_cast<int>(nb.size()));
  double sigma = r > 0.0 ? std::sqrt(r) : 0.0;
  for (size_t m = 0; m < nb.size(); ++m) {
    double v = squared_range_diff(target, net.positions[i], net.positions[nb[m]]);
    z(static_cast<int>(m)) = v + (sigma > 0.0 ? sigma * rng.normal() : 0.0);
  }
  return z;
}

VecX measure_nonlinear(const SensorNetwork& net, int i, const Vec3& target, double r, Rng& rng) {
  if (i < 0 || i >= net.N) throw std::invalid_argument("measure_nonlinear: bad sensor index");
  const auto& nb = net.neighbors[i];
  VecX z(static_cast<int>(nb.size()));
  double sigma = r > 0.0 ? std::sqrt(r) : 0.0;
  for (size_t m = 0; m < nb.size(); ++m) {
    double v = range_diff(target, net.positions[i], net.positions[nb[m]]);
    z(static_cast<int>(m)) = v + (sigma > 0.0 ? sigma * rng.normal() : 0.0);
  }
  return z;
}

MatX nonlinear_h(const SensorNetwork& net, int i, const Vec3& p_eval) {
  const auto& nb = net.neighbors[i];
  MatX H(static_cast<int>(nb.size()), 6);
  for (size_t m = 0; m < nb.size(); ++m)
    H.row(static_cast<int>(m)) = nonlinear_row(p_eval, net.positions[i], net.positions[nb[m]]);
  return H;
}

MatX build_dh(const LinearTdoaModel& model) {
  int rows = 0;
  for (const auto& H : model.H) rows += static_cast<int>(H.rows());
  const int N = static_cast<int>(model.H.size());
  MatX dh = MatX::Zero(rows, N * kStateDim);
  int r0 = 0;
  for (int i = 0; i < N; ++i) {
    dh.block(r0, i * kStateDim, model.H[i].rows(), kStateDim) = model.H[i];
    r0 += static_cast<int>(model.H[i].rows());
  }
  return dh;
}

MatX build_dh_bar(const LinearTdoaModel& model) {
  const int N = static_cast<int>(model.H.size());
  MatX dhb = MatX::Zero(N * kStateDim, N * kStateDim);
  for (int i = 0; i < N; ++i)
    dhb.block(i * kStateDim, i * kStateDim, kStateDim, kStateDim) =
        model.H[i].transpose() * model.H[i];
  return dhb;
}

}  // namespace dtrack
