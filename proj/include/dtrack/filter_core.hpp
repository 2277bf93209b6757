#pragma once

#include <vector>

#include "dtrack/delay_model.hpp"
#include "dtrack/dynamics.hpp"
#include "dtrack/sensor_network.hpp"
#include "dtrack/stability.hpp"
#include "dtrack/tdoa.hpp"
#include "dtrack/types.hpp"

namespace dtrack {

// estimate broadcast by `from` at the end of step `send_step`
struct Message {
  int from = -1;
  int to = -1;
  int send_step = 0;
  Vec6 estimate = Vec6::Zero();
};

// single-time-scale distributed filter: one consensus exchange per dynamics
// step, neighbor estimates arrive with fixed per-link delays
class NetworkFilter {
 public:
  NetworkFilter(const SensorNetwork& net, const NcvModel& model, const LinearTdoaModel& tdoa,
                const GainSet& gains, const DelayProfile& profile,
                const std::vector<Vec6>& init);

  // messages node i needs for the predict of step k (delays clamp to the
  // initial estimates during warm-up; all initial estimates are setup-known)
  std::vector<Message> inbox(int i, int k) const;

  // consensus-weighted extrapolated prior from own history + inbox
  Vec6 node_predict(int i, int k, const std::vector<Message>& inbox) const;

  // output injection with the node's own measurement (bias already removed)
  Vec6 node_update(int i, const Vec6& prior, const VecX& y_i) const;

  // advance the network one step; y[i] is node i's bias-free measurement
  const std::vector<Vec6>& step(const std::vector<VecX>& y);

  int step_count() const { return k_; }
  const std::vector<Vec6>& estimates() const { return current_; }
  const Vec6& posterior(int i, int k) const { return history_[i][k]; }

 private:
  const SensorNetwork& net_;
  const LinearTdoaModel& tdoa_;
  GainSet gains_;
  DelayProfile profile_;
  std::vector<MatX> f_pow_;                // F^0 .. F^{tau_bar+1}
  std::vector<std::vector<Vec6>> history_; // per node, posterior per step
  std::vector<Vec6> current_;
  int k_ = 0;
};

// one barrier-synchronized step over all nodes
const std::vector<Vec6>& run_network_step(NetworkFilter& filter, const std::vector<VecX>& y);

// delay-free rewrite of the same filter on the stacked state; history blocks
// carry past posteriors, initial history is padded with the initial estimates
std::vector<VecX> augmented_recursion(const AugmentedSystem& sys, const GainSet& gains,
                                      const LinearTdoaModel& tdoa,
                                      const std::vector<std::vector<VecX>>& y_per_step,
                                      const std::vector<Vec6>& init);

}  // namespace dtrack
