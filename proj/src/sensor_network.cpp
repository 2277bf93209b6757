#include "dtrack/sensor_network.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dtrack {

namespace {

void add_edge(SensorNetwork& net, int i, int j) {
  if (i == j) throw std::invalid_argument("build_topology: self-loop edge " + std::to_string(i));
  if (i < 0 || j < 0 || i >= net.N || j >= net.N)
    throw std::invalid_argument("build_topology: edge endpoint out of range");
  if (i > j) std::swap(i, j);
  for (auto& e : net.edges)
    if (e.first == i && e.second == j) return;  // dedupe
  net.edges.emplace_back(i, j);
  net.neighbors[i].push_back(j);
  net.neighbors[j].push_back(i);
}

}  // namespace

SensorNetwork build_topology(Topology kind, int N,
                             const std::vector<std::pair<int, int>>& edges) {
  if (N < 2) throw std::invalid_argument("build_topology: N must be >= 2");
  SensorNetwork net;
  net.N = N;
  net.neighbors.resize(N);
  switch (kind) {
    case Topology::cycle:
      if (N < 3) throw std::invalid_argument("build_topology: cycle needs N >= 3");
      for (int i = 0; i < N; ++i) add_edge(net, i, (i + 1) % N);
      break;
    case Topology::complete:
      for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) add_edge(net, i, j);
      break;
    case Topology::edge_list:
      for (auto& [i, j] : edges) add_edge(net, i, j);
      break;
  }
  for (auto& nb : net.neighbors) std::sort(nb.begin(), nb.end());
  return net;
}

SensorNetwork& place_sensors(SensorNetwork& net, const std::vector<Vec3>& positions,
                             double eps) {
  if (static_cast<int>(positions.size()) != net.N)
    throw std::invalid_argument("place_sensors: need exactly N positions");
  for (size_t i = 0; i < positions.size(); ++i)
    for (size_t j = i + 1; j < positions.size(); ++j)
      if ((positions[i] - positions[j]).norm() <= eps)
        throw std::invalid_argument("place_sensors: sensors " + std::to_string(i) + " and " +
                                    std::to_string(j) + " coincide");
  net.positions = positions;
  return net;
}

std::vector<Vec3> random_positions(int N, double lo, double hi, Rng& rng) {
  std::vector<Vec3> out(N);
  for (auto& p : out)
    for (int c = 0; c < 3; ++c) p(c) = rng.uniform(lo, hi);
  return out;
}

bool check_strong_connectivity(const SensorNetwork& net) {
  if (net.N == 0) return false;
  std::vector<char> seen(net.N, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : net.neighbors[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
  }
  return count == net.N;
}

SensorNetwork& design_weights(SensorNetwork& net, WeightRule rule, double param,
                              std::uint64_t seed) {
  if (!check_strong_connectivity(net))
    throw std::invalid_argument("design_weights: graph must be connected");
  const int N = net.N;
  MatX W = MatX::Zero(N, N);
  for (auto& [i, j] : net.edges) {
    double di = static_cast<double>(net.neighbors[i].size());
    double dj = static_cast<double>(net.neighbors[j].size());
    double w = 1.0 / (1.0 + std::max(di, dj));
    W(i, j) = W(j, i) = w;
  }
  for (int i = 0; i < N; ++i) W(i, i) = 1.0 - W.row(i).sum();

  switch (rule) {
    case WeightRule::metropolis:
      break;
    case WeightRule::lazy_metropolis: {
      if (param < 0.0 || param >= 1.0)
        throw std::invalid_argument("design_weights: laziness must be in [0, 1)");
      W = param * MatX::Identity(N, N) + (1.0 - param) * W;
      break;
    }
    case WeightRule::randomized_stochastic: {
      // symmetric edge/diagonal mass transfers keep W doubly stochastic and
      // supported on the graph while making it almost surely nonsingular
      Rng rng(seed);
      for (auto& [i, j] : net.edges) {
        double lim = 0.45 * std::min({W(i, j), W(i, i), W(j, j), 1.0 - W(i, j)});
        double d = rng.uniform(-lim, lim);
        W(i, j) += d;
        W(j, i) += d;
        W(i, i) -= d;
        W(j, j) -= d;
      }
      break;
    }
  }
  net.W = W;
  return net;
}

}  // namespace dtrack
