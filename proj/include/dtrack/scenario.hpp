#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "dtrack/delay_model.hpp"
#include "dtrack/dynamics.hpp"
#include "dtrack/sensor_network.hpp"
#include "dtrack/stability.hpp"
#include "dtrack/tdoa.hpp"

namespace dtrack {

using Json = nlohmann::ordered_json;

enum class GainMode { supplied, designed };

struct DelaySpecCfg {
  DelayScheme scheme = DelayScheme::constant;
  int tau_bar = 0;
  std::vector<std::tuple<int, int, int>> per_link;
};

struct GainSpecCfg {
  GainMode mode = GainMode::designed;
  std::vector<Mat6> K;  // used when supplied
  GainSearchOptions search;
};

struct InitSpec {
  double position_box = 10.0;   // initial target position uniform in [0, box]^3
  double speed_sigma = 1.0;     // initial velocity components N(0, sigma^2)
  double perturbation = 1.0;    // initial estimate = truth + perturbation * N(0, I)
};

struct Scenario {
  std::string name = "scenario";
  std::string description;

  Topology topology = Topology::cycle;
  int N = 6;
  std::vector<std::pair<int, int>> edges;  // for edge-list topology
  std::optional<std::vector<Vec3>> positions;
  std::uint64_t placement_seed = 7;
  double position_lo = 0.0, position_hi = 10.0;
  std::optional<MatX> weights;
  WeightRule weight_rule = WeightRule::metropolis;
  double weight_param = 0.0;
  std::uint64_t weight_seed = 1;

  double T = 1.0;
  double q = 1e-4;  // process noise intensity, Q = q * I3
  double r = 1e-2;  // measurement noise variance per row

  DelaySpecCfg delays;
  GainSpecCfg gains;
  InitSpec init;

  int steps = 100;
  int trials = 1;
  std::uint64_t master_seed = 1;
};

Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::string& path);

// every effective value echoed back, defaults resolved
Json effective_config(const Scenario& s);

// materialized network, models, and gains ready to run
struct BuiltScenario {
  SensorNetwork net;
  NcvModel model;
  LinearTdoaModel tdoa;
  GainSet gains;
  MatX dh_bar;
};

BuiltScenario build_scenario(const Scenario& s);

}  // namespace dtrack
