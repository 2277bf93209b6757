#include "dtrack/filter_core.hpp"

#include <stdexcept>
#include <string>

namespace dtrack {

NetworkFilter::NetworkFilter(const SensorNetwork& net, const NcvModel& model,
                             const LinearTdoaModel& tdoa, const GainSet& gains,
                             const DelayProfile& profile, const std::vector<Vec6>& init)
    : net_(net), tdoa_(tdoa), gains_(gains), profile_(profile) {
  if (static_cast<int>(init.size()) != net.N)
    throw std::invalid_argument("NetworkFilter: need one initial estimate per node");
  if (static_cast<int>(gains_.K.size()) != net.N)
    throw std::invalid_argument("NetworkFilter: need one gain block per node");
  f_pow_.resize(profile.tau_bar + 2);
  f_pow_[0] = MatX::Identity(kStateDim, kStateDim);
  for (int p = 1; p <= profile.tau_bar + 1; ++p) f_pow_[p] = f_pow_[p - 1] * MatX(model.F);
  history_.resize(net.N);
  for (int i = 0; i < net.N; ++i) history_[i].push_back(init[i]);
  current_ = init;
}

std::vector<Message> NetworkFilter::inbox(int i, int k) const {
  std::vector<Message> box;
  for (int j : net_.neighbors[i]) {
    Message m;
    m.from = j;
    m.to = i;
    m.send_step = std::max(0, k - 1 - profile_.tau(i, j));
    m.estimate = history_[j][m.send_step];
    box.push_back(m);
  }
  return box;
}

Vec6 NetworkFilter::node_predict(int i, int k, const std::vector<Message>& box) const {
  const MatX& W = net_.W;
  Vec6 prior = W(i, i) * (f_pow_[1] * history_[i][k - 1]);
  for (int j : net_.neighbors[i]) {
    int want = std::max(0, k - 1 - profile_.tau(i, j));
    const Message* found = nullptr;
    for (const auto& m : box)
      if (m.from == j && m.to == i && m.send_step == want) {
        found = &m;
        break;
      }
    if (!found)
      throw std::runtime_error("protocol violation: node " + std::to_string(i) +
                               " missing message from " + std::to_string(j) + " sent at step " +
                               std::to_string(want));
    prior += W(i, j) * (f_pow_[profile_.tau(i, j) + 1] * found->estimate);
  }
  return prior;
}

Vec6 NetworkFilter::node_update(int i, const Vec6& prior, const VecX& y_i) const {
  const MatX& H = tdoa_.H[i];
  if (y_i.size() != H.rows())
    throw std::invalid_argument("node_update: measurement size mismatch at node " +
                                std::to_string(i));
  return prior + gains_.K[i] * (H.transpose() * (y_i - H * prior));
}

const std::vector<Vec6>& NetworkFilter::step(const std::vector<VecX>& y) {
  if (static_cast<int>(y.size()) != net_.N)
    throw std::invalid_argument("step: need one measurement block per node");
  const int k = k_ + 1;
  std::vector<Vec6> post(net_.N);
  for (int i = 0; i < net_.N; ++i) {
    Vec6 prior = node_predict(i, k, inbox(i, k));
    post[i] = node_update(i, prior, y[i]);
  }
  for (int i = 0; i < net_.N; ++i) history_[i].push_back(post[i]);
  current_ = std::move(post);
  k_ = k;
  return current_;
}

const std::vector<Vec6>& run_network_step(NetworkFilter& filter, const std::vector<VecX>& y) {
  return filter.step(y);
}

std::vector<VecX> augmented_recursion(const AugmentedSystem& sys, const GainSet& gains,
                                      const LinearTdoaModel& tdoa,
                                      const std::vector<std::vector<VecX>>& y_per_step,
                                      const std::vector<Vec6>& init) {
  const int N = sys.N;
  const int n = sys.n;
  const int Nn = N * n;
  if (static_cast<int>(init.size()) != N)
    throw std::invalid_argument("augmented_recursion: need one initial estimate per node");

  MatX K = big_k(gains);
  MatX dh_bar = build_dh_bar(tdoa);

  VecX X = VecX::Zero(Nn * (sys.tau_bar + 1));
  for (int r = 0; r <= sys.tau_bar; ++r)
    for (int i = 0; i < N; ++i) X.segment(r * Nn + i * n, n) = init[i];

  std::vector<VecX> out;
  out.reserve(y_per_step.size());
  for (const auto& y : y_per_step) {
    if (static_cast<int>(y.size()) != N)
      throw std::invalid_argument("augmented_recursion: measurement block count mismatch");
    X = sys.WF_bar * X;
    VecX u = VecX::Zero(Nn);  // stacked H_i^T y_i
    for (int i = 0; i < N; ++i) u.segment(i * n, n) = tdoa.H[i].transpose() * y[i];
    X.head(Nn) += K * (u - dh_bar * X.head(Nn));
    out.push_back(X.head(Nn));
  }
  return out;
}

}  // namespace dtrack
