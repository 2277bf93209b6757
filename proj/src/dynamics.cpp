#include "dtrack/dynamics.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

namespace dtrack {

NcvModel build_ncv(double T, const Mat3& Q) {
  if (!(T > 0.0)) throw std::invalid_argument("build_ncv: T must be positive");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("build_ncv: Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(Q);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("build_ncv: Q must be positive semidefinite");

  NcvModel m;
  m.T = T;
  m.Q = Q;
  m.F.setIdentity();
  m.F.topRightCorner<3, 3>() = T * Mat3::Identity();
  m.G.topRows<3>() = 0.5 * T * T * Mat3::Identity();
  m.G.bottomRows<3>() = T * Mat3::Identity();
  return m;
}

TargetState step_target(const NcvModel& model, const TargetState& x, const Vec3& q) {
  return model.F * x + model.G * q;
}

Vec3 sample_process_noise(const Mat3& Q, Rng& rng) {
  // LLT needs strict positive definite; shift by tiny jitter only when Q != 0
  if (Q.isZero(0.0)) return Vec3::Zero();
  Eigen::LLT<Mat3> llt(Q + 1e-300 * Mat3::Identity());
  if (llt.info() != Eigen::Success) {
    // PSD but rank-deficient: fall back to eigen square root
    Eigen::SelfAdjointEigenSolver<Mat3> es(Q);
    Vec3 lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal() * rng.normal3();
  }
  return llt.matrixL() * rng.normal3();
}

MatX matrix_power(const MatX& m, int p) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_power: square matrix required");
  if (p < 0) throw std::invalid_argument("matrix_power: negative power");
  MatX acc = MatX::Identity(m.rows(), m.cols());
  MatX base = m;
  while (p > 0) {
    if (p & 1) acc = acc * base;
    p >>= 1;
    if (p) base = base * base;
  }
  return acc;
}

Vec3 scripted_accel(const std::vector<ManeuverSegment>& script, int k) {
  Vec3 a = Vec3::Zero();
  for (const auto& seg : script)
    if (k >= seg.from_step) a = seg.accel;
  return a;
}

}  // namespace dtrack
