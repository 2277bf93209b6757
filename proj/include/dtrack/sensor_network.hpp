#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dtrack/rng.hpp"
#include "dtrack/types.hpp"

namespace dtrack {

enum class Topology { cycle, complete, edge_list };

struct SensorNetwork {
  int N = 0;
  std::vector<std::pair<int, int>> edges;    // undirected, stored with i < j
  std::vector<std::vector<int>> neighbors;   // sorted ascending per node
  std::vector<Vec3> positions;               // empty until placed
  MatX W;                                    // 0x0 until designed
};

SensorNetwork build_topology(Topology kind, int N,
                             const std::vector<std::pair<int, int>>& edges = {});

// validates pairwise distinctness (distance > eps)
SensorNetwork& place_sensors(SensorNetwork& net, const std::vector<Vec3>& positions,
                             double eps = 1e-6);

std::vector<Vec3> random_positions(int N, double lo, double hi, Rng& rng);

bool check_strong_connectivity(const SensorNetwork& net);

enum class WeightRule { metropolis, lazy_metropolis, randomized_stochastic };

// symmetric doubly-stochastic weights supported on the graph + self-loops;
// `param` is the laziness for lazy_metropolis, `seed` drives randomized_stochastic
SensorNetwork& design_weights(SensorNetwork& net, WeightRule rule = WeightRule::metropolis,
                              double param = 0.0, std::uint64_t seed = 1);

}  // namespace dtrack
