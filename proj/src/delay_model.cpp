#include "dtrack/delay_model.hpp"

#include <stdexcept>
#include <string>

namespace dtrack {

namespace {

bool is_edge(const SensorNetwork& net, int i, int j) {
  for (int u : net.neighbors[i])
    if (u == j) return true;
  return false;
}

}  // namespace

DelayProfile assign_delays(const SensorNetwork& net, DelayScheme scheme, int tau_bar, Rng& rng,
                           const std::vector<std::tuple<int, int, int>>& per_link) {
  if (tau_bar < 0) throw std::invalid_argument("assign_delays: tau_bar must be >= 0");
  DelayProfile p;
  p.tau_bar = tau_bar;
  p.tau = MatXi::Zero(net.N, net.N);
  switch (scheme) {
    case DelayScheme::constant:
      for (int i = 0; i < net.N; ++i)
        for (int j : net.neighbors[i]) p.tau(i, j) = tau_bar;
      break;
    case DelayScheme::uniform_random:
      // directed: i's view of j and j's view of i drawn independently
      for (int i = 0; i < net.N; ++i)
        for (int j : net.neighbors[i]) p.tau(i, j) = rng.uniform_int(0, tau_bar);
      break;
    case DelayScheme::per_link_list:
      for (const auto& [i, j, d] : per_link) {
        if (i < 0 || j < 0 || i >= net.N || j >= net.N || !is_edge(net, i, j))
          throw std::invalid_argument("assign_delays: per_link entry (" + std::to_string(i) +
                                      "," + std::to_string(j) + ") is not a graph edge");
        if (d < 0 || d > tau_bar)
          throw std::invalid_argument("assign_delays: per_link delay out of [0, tau_bar]");
        p.tau(i, j) = d;
      }
      break;
  }
  return p;
}

int indicator(const SensorNetwork& net, const DelayProfile& profile, int i, int j, int r) {
  if (i == j) return r == 0 ? 1 : 0;
  if (!is_edge(net, i, j)) return 0;
  return profile.tau(i, j) == r ? 1 : 0;
}

MatX build_W_r(const SensorNetwork& net, const MatX& W, const DelayProfile& profile, int r) {
  if (W.rows() != net.N || W.cols() != net.N)
    throw std::invalid_argument("build_W_r: W size mismatch");
  MatX Wr = MatX::Zero(net.N, net.N);
  for (int i = 0; i < net.N; ++i) {
    if (r == 0) Wr(i, i) = W(i, i);
    for (int j : net.neighbors[i])
      if (profile.tau(i, j) == r) Wr(i, j) = W(i, j);
  }
  return Wr;
}

MatX build_augmented_W(const SensorNetwork& net, const MatX& W, const DelayProfile& profile) {
  const int N = net.N;
  const int tb = profile.tau_bar;
  MatX Wb = MatX::Zero(N * (tb + 1), N * (tb + 1));
  for (int r = 0; r <= tb; ++r)
    Wb.block(0, r * N, N, N) = build_W_r(net, W, profile, r);
  for (int r = 0; r < tb; ++r)
    Wb.block((r + 1) * N, r * N, N, N) = MatX::Identity(N, N);
  return Wb;
}

AugmentedSystem build_augmented_WF(const SensorNetwork& net, const MatX& W, const Mat6& F,
                                   const DelayProfile& profile) {
  const int N = net.N;
  const int n = kStateDim;
  const int tb = profile.tau_bar;
  AugmentedSystem sys;
  sys.N = N;
  sys.tau_bar = tb;
  sys.WF_bar = MatX::Zero(N * n * (tb + 1), N * n * (tb + 1));
  MatX Fp = F;  // F^{r+1}
  for (int r = 0; r <= tb; ++r) {
    sys.WF_bar.block(0, r * N * n, N * n, N * n) = kron(build_W_r(net, W, profile, r), Fp);
    if (r < tb) Fp = Fp * F;
  }
  for (int r = 0; r < tb; ++r)
    sys.WF_bar.block((r + 1) * N * n, r * N * n, N * n, N * n) = MatX::Identity(N * n, N * n);
  return sys;
}

}  // namespace dtrack
