#include "dtrack/scenario.hpp"

#include <fstream>
#include <stdexcept>

namespace dtrack {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

double get_num(const Json& j, const std::string& path, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(path + "." + key, "must be a number");
  return j[key].get<double>();
}

std::int64_t get_int(const Json& j, const std::string& path, const char* key,
                     std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail(path + "." + key, "must be an integer");
  return j[key].get<std::int64_t>();
}

std::string get_str(const Json& j, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) fail(path + "." + key, "must be a string");
  return j[key].get<std::string>();
}

Topology parse_topology(const std::string& s) {
  if (s == "cycle") return Topology::cycle;
  if (s == "complete") return Topology::complete;
  if (s == "edge-list") return Topology::edge_list;
  fail("network.topology", "unknown value '" + s + "'");
}

std::string topology_name(Topology t) {
  switch (t) {
    case Topology::cycle: return "cycle";
    case Topology::complete: return "complete";
    case Topology::edge_list: return "edge-list";
  }
  return "?";
}

WeightRule parse_weight_rule(const std::string& s) {
  if (s == "metropolis") return WeightRule::metropolis;
  if (s == "lazy-metropolis") return WeightRule::lazy_metropolis;
  if (s == "randomized-stochastic") return WeightRule::randomized_stochastic;
  fail("network.weight_rule", "unknown value '" + s + "'");
}

std::string weight_rule_name(WeightRule r) {
  switch (r) {
    case WeightRule::metropolis: return "metropolis";
    case WeightRule::lazy_metropolis: return "lazy-metropolis";
    case WeightRule::randomized_stochastic: return "randomized-stochastic";
  }
  return "?";
}

DelayScheme parse_scheme(const std::string& s) {
  if (s == "constant") return DelayScheme::constant;
  if (s == "uniform-random") return DelayScheme::uniform_random;
  if (s == "per-link-list") return DelayScheme::per_link_list;
  fail("delays.scheme", "unknown value '" + s + "'");
}

std::string scheme_name(DelayScheme s) {
  switch (s) {
    case DelayScheme::constant: return "constant";
    case DelayScheme::uniform_random: return "uniform-random";
    case DelayScheme::per_link_list: return "per-link-list";
  }
  return "?";
}

}  // namespace

Scenario parse_scenario(const Json& doc) {
  Scenario s;
  s.name = get_str(doc, "", "name", s.name);
  s.description = get_str(doc, "", "description", s.description);

  if (doc.contains("network")) {
    const Json& net = doc["network"];
    if (!net.is_object()) fail("network", "must be an object");
    s.topology = parse_topology(get_str(net, "network", "topology", "cycle"));
    s.N = static_cast<int>(get_int(net, "network", "N", s.N));
    if (s.N < 2) fail("network.N", "must be >= 2");
    if (net.contains("edges")) {
      if (!net["edges"].is_array()) fail("network.edges", "must be an array of [i, j]");
      for (const auto& e : net["edges"]) {
        if (!e.is_array() || e.size() != 2) fail("network.edges", "entries must be [i, j]");
        s.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
    }
    if (net.contains("positions") && !net["positions"].is_null()) {
      if (!net["positions"].is_array()) fail("network.positions", "must be an array of [x, y, z]");
      std::vector<Vec3> pos;
      for (const auto& p : net["positions"]) {
        if (!p.is_array() || p.size() != 3) fail("network.positions", "entries must be [x, y, z]");
        pos.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
      }
      s.positions = std::move(pos);
    }
    s.placement_seed =
        static_cast<std::uint64_t>(get_int(net, "network", "placement_seed",
                                           static_cast<std::int64_t>(s.placement_seed)));
    if (net.contains("position_range")) {
      const Json& pr = net["position_range"];
      if (!pr.is_array() || pr.size() != 2) fail("network.position_range", "must be [lo, hi]");
      s.position_lo = pr[0].get<double>();
      s.position_hi = pr[1].get<double>();
      if (!(s.position_lo < s.position_hi)) fail("network.position_range", "need lo < hi");
    }
    if (net.contains("weights") && !net["weights"].is_null()) {
      if (!net["weights"].is_array()) fail("network.weights", "must be a square matrix");
      const auto& wj = net["weights"];
      MatX W(wj.size(), wj.size());
      for (size_t i = 0; i < wj.size(); ++i) {
        if (!wj[i].is_array() || wj[i].size() != wj.size())
          fail("network.weights", "must be a square matrix");
        for (size_t j = 0; j < wj.size(); ++j) W(i, j) = wj[i][j].get<double>();
      }
      s.weights = std::move(W);
    }
    s.weight_rule = parse_weight_rule(get_str(net, "network", "weight_rule", "metropolis"));
    s.weight_param = get_num(net, "network", "weight_param", s.weight_param);
    s.weight_seed = static_cast<std::uint64_t>(
        get_int(net, "network", "weight_seed", static_cast<std::int64_t>(s.weight_seed)));
  }

  if (doc.contains("dynamics")) {
    const Json& d = doc["dynamics"];
    s.T = get_num(d, "dynamics", "T", s.T);
    if (!(s.T > 0.0)) fail("dynamics.T", "must be positive");
    s.q = get_num(d, "dynamics", "q", s.q);
    if (s.q < 0.0) fail("dynamics.q", "must be >= 0");
  }
  if (doc.contains("measurement")) {
    s.r = get_num(doc["measurement"], "measurement", "r", s.r);
    if (s.r < 0.0) fail("measurement.r", "must be >= 0");
  }

  if (doc.contains("delays")) {
    const Json& d = doc["delays"];
    s.delays.scheme = parse_scheme(get_str(d, "delays", "scheme", "constant"));
    s.delays.tau_bar = static_cast<int>(get_int(d, "delays", "tau_bar", s.delays.tau_bar));
    if (s.delays.tau_bar < 0) fail("delays.tau_bar", "must be >= 0");
    if (d.contains("per_link")) {
      if (!d["per_link"].is_array()) fail("delays.per_link", "must be an array of [i, j, delay]");
      for (const auto& e : d["per_link"]) {
        if (!e.is_array() || e.size() != 3) fail("delays.per_link", "entries must be [i, j, delay]");
        s.delays.per_link.emplace_back(e[0].get<int>(), e[1].get<int>(), e[2].get<int>());
      }
    }
  }

  if (doc.contains("gains")) {
    const Json& g = doc["gains"];
    std::string mode = get_str(g, "gains", "mode", "designed");
    if (mode == "supplied")
      s.gains.mode = GainMode::supplied;
    else if (mode == "designed")
      s.gains.mode = GainMode::designed;
    else
      fail("gains.mode", "unknown value '" + mode + "'");
    if (g.contains("K") && !g["K"].is_null()) {
      if (!g["K"].is_array()) fail("gains.K", "must be an array of 6x6 matrices");
      for (const auto& kj : g["K"]) {
        if (!kj.is_array() || kj.size() != 6) fail("gains.K", "each gain must be 6x6");
        Mat6 K;
        for (int r = 0; r < 6; ++r) {
          if (!kj[r].is_array() || kj[r].size() != 6) fail("gains.K", "each gain must be 6x6");
          for (int c = 0; c < 6; ++c) K(r, c) = kj[r][c].get<double>();
        }
        s.gains.K.push_back(K);
      }
    }
    s.gains.search.alpha = get_num(g, "gains", "alpha", s.gains.search.alpha);
    s.gains.search.beta = get_num(g, "gains", "beta", s.gains.search.beta);
    s.gains.search.budget = static_cast<int>(get_int(g, "gains", "budget", s.gains.search.budget));
    s.gains.search.margin = get_num(g, "gains", "margin", s.gains.search.margin);
    s.gains.search.seed = static_cast<std::uint64_t>(
        get_int(g, "gains", "seed", static_cast<std::int64_t>(s.gains.search.seed)));
    if (s.gains.mode == GainMode::supplied && s.gains.K.empty())
      fail("gains.K", "required when gains.mode is 'supplied'");
  }

  if (doc.contains("init")) {
    const Json& i = doc["init"];
    s.init.position_box = get_num(i, "init", "position_box", s.init.position_box);
    s.init.speed_sigma = get_num(i, "init", "speed_sigma", s.init.speed_sigma);
    s.init.perturbation = get_num(i, "init", "perturbation", s.init.perturbation);
  }

  s.steps = static_cast<int>(get_int(doc, "", "steps", s.steps));
  if (s.steps < 1) fail("steps", "must be >= 1");
  s.trials = static_cast<int>(get_int(doc, "", "trials", s.trials));
  if (s.trials < 1) fail("trials", "must be >= 1");
  s.master_seed = static_cast<std::uint64_t>(
      get_int(doc, "", "master_seed", static_cast<std::int64_t>(s.master_seed)));
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario: cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error("load_scenario: parse error in " + path + ": " + e.what());
  }
  return parse_scenario(doc);
}

Json effective_config(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["description"] = s.description;
  Json net;
  net["topology"] = topology_name(s.topology);
  net["N"] = s.N;
  if (!s.edges.empty()) {
    Json ej = Json::array();
    for (auto& [a, b] : s.edges) ej.push_back({a, b});
    net["edges"] = ej;
  }
  if (s.positions) {
    Json pj = Json::array();
    for (const auto& p : *s.positions) pj.push_back({p(0), p(1), p(2)});
    net["positions"] = pj;
  } else {
    net["positions"] = nullptr;
  }
  net["placement_seed"] = s.placement_seed;
  net["position_range"] = {s.position_lo, s.position_hi};
  if (s.weights) {
    Json wj = Json::array();
    for (Eigen::Index i = 0; i < s.weights->rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < s.weights->cols(); ++k) row.push_back((*s.weights)(i, k));
      wj.push_back(row);
    }
    net["weights"] = wj;
  } else {
    net["weights"] = nullptr;
  }
  net["weight_rule"] = weight_rule_name(s.weight_rule);
  net["weight_param"] = s.weight_param;
  net["weight_seed"] = s.weight_seed;
  j["network"] = net;

  j["dynamics"] = {{"T", s.T}, {"q", s.q}};
  j["measurement"] = {{"r", s.r}};

  Json dj;
  dj["scheme"] = scheme_name(s.delays.scheme);
  dj["tau_bar"] = s.delays.tau_bar;
  if (!s.delays.per_link.empty()) {
    Json pl = Json::array();
    for (auto& [a, b, d] : s.delays.per_link) pl.push_back({a, b, d});
    dj["per_link"] = pl;
  }
  j["delays"] = dj;

  Json gj;
  gj["mode"] = s.gains.mode == GainMode::supplied ? "supplied" : "designed";
  if (!s.gains.K.empty()) {
    Json kj = Json::array();
    for (const auto& K : s.gains.K) {
      Json m = Json::array();
      for (int r = 0; r < 6; ++r) {
        Json row = Json::array();
        for (int c = 0; c < 6; ++c) row.push_back(K(r, c));
        m.push_back(row);
      }
      kj.push_back(m);
    }
    gj["K"] = kj;
  }
  gj["alpha"] = s.gains.search.alpha;
  gj["beta"] = s.gains.search.beta;
  gj["budget"] = s.gains.search.budget;
  gj["margin"] = s.gains.search.margin;
  gj["seed"] = s.gains.search.seed;
  j["gains"] = gj;

  j["init"] = {{"position_box", s.init.position_box},
               {"speed_sigma", s.init.speed_sigma},
               {"perturbation", s.init.perturbation}};
  j["steps"] = s.steps;
  j["trials"] = s.trials;
  j["master_seed"] = s.master_seed;
  return j;
}

BuiltScenario build_scenario(const Scenario& s) {
  BuiltScenario b;
  b.net = build_topology(s.topology, s.N, s.edges);

  if (s.positions) {
    place_sensors(b.net, *s.positions);
  } else {
    Rng rng(s.placement_seed);
    place_sensors(b.net, random_positions(s.N, s.position_lo, s.position_hi, rng));
  }

  if (s.weights) {
    const MatX& W = *s.weights;
    if (W.rows() != s.N || W.cols() != s.N)
      throw std::invalid_argument("network.weights: must be N x N");
    if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("network.weights: must be symmetric");
    if (W.minCoeff() < -1e-12)
      throw std::invalid_argument("network.weights: entries must be nonnegative");
    for (int i = 0; i < s.N; ++i) {
      if (std::abs(W.row(i).sum() - 1.0) > 1e-9)
        throw std::invalid_argument("network.weights: rows must sum to 1");
      for (int j = 0; j < s.N; ++j) {
        if (i == j || W(i, j) == 0.0) continue;
        bool edge = false;
        for (int u : b.net.neighbors[i]) edge = edge || (u == j);
        if (!edge)
          throw std::invalid_argument("network.weights: nonzero entry off the graph support");
      }
    }
    b.net.W = W;
  } else {
    design_weights(b.net, s.weight_rule, s.weight_param, s.weight_seed);
  }

  b.model = build_ncv(s.T, s.q * Mat3::Identity());
  b.tdoa = build_linear_model(b.net);
  b.dh_bar = build_dh_bar(b.tdoa);

  if (s.gains.mode == GainMode::supplied) {
    if (static_cast<int>(s.gains.K.size()) != s.N)
      throw std::invalid_argument("gains.K: need one 6x6 gain per node");
    b.gains.K = s.gains.K;
  } else {
    b.gains = design_gains(b.net.W, b.model.F, b.tdoa, s.gains.search);
  }
  return b;
}

}  // namespace dtrack
