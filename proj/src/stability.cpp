#include "dtrack/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace dtrack {

namespace {

int numeric_rank(const MatX& m) {
  // singular values below max-dim * sigma_max * 1e-12 count as zero
  Eigen::BDCSVD<MatX> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  double tol = static_cast<double>(std::max(m.rows(), m.cols())) * s(0) * 1e-12;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return rank;
}

int numeric_rank_complex(const Eigen::MatrixXcd& m) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  double tol = static_cast<double>(std::max(m.rows(), m.cols())) * s(0) * 1e-12;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return rank;
}

Mat3 position_block_pinv(const MatX& H) {
  Mat3 A = (H.transpose() * H).topLeftCorner<3, 3>();
  Eigen::SelfAdjointEigenSolver<Mat3> es(A);
  Vec3 lam = es.eigenvalues();
  double tol = 3.0 * std::abs(lam.maxCoeff()) * 1e-12;
  Vec3 inv = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    if (lam(i) > tol) inv(i) = 1.0 / lam(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

namespace {

double eig_radius(const MatX& m) {
  Eigen::EigenSolver<MatX> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_radius: eigensolver failed to converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double spectral_radius(const MatX& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: square matrix required");
  if (m.rows() == 0) return 0.0;
  double base = eig_radius(m);
  if (base == 0.0 || !std::isfinite(base)) return base;

  // Sharpen by repeated squaring: rho(A) = rho(A^{2^m})^{1/2^m}, with entrywise
  // rescaling tracked in log space so the powers stay representable.  Roots
  // divide the eigensolver's absolute error, which for defective eigenvalues
  // (the unit radius of F and its Kronecker lifts is one) sits near sqrt(eps)
  // and would otherwise dominate tight comparisons against 1.
  constexpr int kSquarings = 5;
  MatX b = m;
  double logscale = 0.0;
  for (int t = 1; t <= kSquarings; ++t) {
    b = (b * b).eval();
    double s = b.cwiseAbs().maxCoeff();
    if (s == 0.0) return 0.0;
    if (!std::isfinite(s)) return base;
    b /= s;
    logscale += std::log(s) / std::exp2(t);
  }
  double rb = eig_radius(b);
  if (rb == 0.0) return 0.0;
  double sharp = std::exp(std::log(rb) / std::exp2(kSquarings) + logscale);
  return std::isfinite(sharp) ? sharp : base;
}

ObservabilityReport check_distributed_observability(const MatX& W, const Mat6& F,
                                                    const MatX& dh_bar) {
  const int dim = static_cast<int>(dh_bar.rows());
  MatX A = kron(W, MatX(F));
  if (A.rows() != dim)
    throw std::invalid_argument("check_distributed_observability: size mismatch");

  ObservabilityReport rep;
  rep.dim = dim;
  MatX obs(dim * dim, dim);
  MatX cur = dh_bar;
  for (int k = 0; k < dim; ++k) {
    obs.middleRows(k * dim, dim) = cur;
    if (k + 1 < dim) cur = cur * A;
  }
  rep.rank = numeric_rank(obs);
  rep.observable = (rep.rank == dim);

  // PBH on the boundary-and-outside spectrum
  rep.detectable = true;
  Eigen::EigenSolver<MatX> es(A, /*computeEigenvectors=*/false);
  Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
  Eigen::MatrixXcd Cc = dh_bar.cast<std::complex<double>>();
  for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e) {
    std::complex<double> lam = es.eigenvalues()(e);
    if (std::abs(lam) < 1.0 - 1e-9) continue;
    Eigen::MatrixXcd pbh(2 * dim, dim);
    pbh.topRows(dim) = Ac - lam * Eigen::MatrixXcd::Identity(dim, dim);
    pbh.bottomRows(dim) = Cc;
    if (numeric_rank_complex(pbh) < dim) {
      rep.detectable = false;
      break;
    }
  }
  return rep;
}

MatX big_k(const GainSet& gains) {
  const int N = static_cast<int>(gains.K.size());
  MatX K = MatX::Zero(N * kStateDim, N * kStateDim);
  for (int i = 0; i < N; ++i)
    K.block(i * kStateDim, i * kStateDim, kStateDim, kStateDim) = gains.K[i];
  return K;
}

GainSet design_gains(const MatX& W, const Mat6& F, const LinearTdoaModel& model,
                     const GainSearchOptions& opts) {
  const int N = static_cast<int>(model.H.size());
  if (W.rows() != N) throw std::invalid_argument("design_gains: W size mismatch");
  MatX dh_bar = build_dh_bar(model);

  auto obs = check_distributed_observability(W, F, dh_bar);
  if (!obs.detectable)
    throw std::invalid_argument("design_gains: pair (W (x) F, Dbar_H) is not detectable");

  GainSet gains;
  gains.K.resize(N);
  for (int i = 0; i < N; ++i) {
    Mat3 Ainv = position_block_pinv(model.H[i]);
    gains.K[i].setZero();
    gains.K[i].topLeftCorner<3, 3>() = opts.alpha * Ainv;
    gains.K[i].bottomLeftCorner<3, 3>() = opts.beta * Ainv;
  }

  MatX A = kron(W, MatX(F));
  auto radius = [&](const GainSet& g) {
    MatX cl = A - big_k(g) * (dh_bar * A);
    return spectral_radius(cl);
  };

  double rho = radius(gains);
  const double target = 1.0 - opts.margin;
  Rng rng(opts.seed);
  double step = 0.3;
  for (int ev = 0; ev < opts.budget && rho >= target; ++ev) {
    // only the first three columns act: Dbar_H is zero on the velocity block
    int i = rng.uniform_int(0, N - 1);
    int r = rng.uniform_int(0, kStateDim - 1);
    int c = rng.uniform_int(0, 2);
    double delta = rng.normal() * step * (std::abs(gains.K[i](r, c)) + 1e-3);
    gains.K[i](r, c) += delta;
    double rho2 = radius(gains);
    if (rho2 < rho) {
      rho = rho2;
      step = std::min(step * 1.3, 1.0);
    } else {
      gains.K[i](r, c) -= delta;
      step = std::max(step * 0.97, 0.01);
    }
  }
  return gains;
}

ClosedLoop build_closed_loop(const MatX& W, const Mat6& F, const GainSet& gains,
                             const MatX& dh_bar) {
  ClosedLoop cl;
  MatX A = kron(W, MatX(F));
  cl.A = A - big_k(gains) * (dh_bar * A);
  cl.rho = spectral_radius(cl.A);
  return cl;
}

ClosedLoop build_closed_loop(const SensorNetwork& net, const MatX& W, const Mat6& F,
                             const GainSet& gains, const MatX& dh_bar,
                             const DelayProfile& profile) {
  AugmentedSystem sys = build_augmented_WF(net, W, F, profile);
  const int Nn = sys.N * sys.n;
  ClosedLoop cl;
  cl.A = std::move(sys.WF_bar);
  cl.A.topRows(Nn) -= big_k(gains) * (dh_bar * cl.A.topRows(Nn));
  cl.rho = spectral_radius(cl.A);
  return cl;
}

std::optional<int> max_delay_bound(const MatX& W, const Mat6& F, const GainSet& gains,
                                   const MatX& dh_bar, int cap) {
  if (cap < 0) throw std::invalid_argument("max_delay_bound: cap must be >= 0");
  MatX K = big_k(gains);
  MatX Fp = F;  // F^{tau+1}
  std::optional<int> best;
  for (int tau = 0; tau <= cap; ++tau) {
    MatX A = kron(W, Fp);
    double rho = spectral_radius(A - K * (dh_bar * A));
    if (rho >= 1.0) break;
    best = tau;
    Fp = Fp * MatX(F);
  }
  return best;
}

}  // namespace dtrack
