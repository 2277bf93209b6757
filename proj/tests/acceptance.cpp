// integration gate: one self-contained check per numbered criterion, each
// printing a single [PASS]/[FAIL] line with the measured values

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "dtrack/filter_core.hpp"
#include "dtrack/io.hpp"
#include "dtrack/sim.hpp"

using namespace dtrack;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario reference_scenario() {
  return load_scenario(std::string(DTRACK_CONFIG_DIR) + "/reference_scenario.json");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---- 1: message-passing filter vs augmented recursion on one noisy run ----
Outcome criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  Scenario sc = reference_scenario();
  sc.delays.scheme = DelayScheme::uniform_random;
  sc.delays.tau_bar = 3;
  sc.steps = 100;
  BuiltScenario built = build_scenario(sc);
  DelayProfile profile = scenario_delays(sc, built);

  bool hetero = false;
  for (int i = 0; i < 6; ++i)
    for (int j : built.net.neighbors[i]) hetero = hetero || (profile.tau(i, j) != profile.tau(0, 1));

  std::uint64_t trial_seed = Rng::derive(sc.master_seed, 1);
  Rng init_rng(Rng::derive(trial_seed, 0));
  Vec6 truth;
  for (int c = 0; c < 3; ++c) truth(c) = init_rng.uniform(0.0, sc.init.position_box);
  truth.tail<3>() = sc.init.speed_sigma * init_rng.normal3();
  std::vector<Vec6> init(6);
  for (auto& v : init) v = truth + sc.init.perturbation * init_rng.normal6();
  Rng proc_rng(Rng::derive(trial_seed, 1));
  Rng meas_rng(Rng::derive(trial_seed, 2));

  std::vector<std::vector<VecX>> y_per_step(sc.steps);
  Vec6 x = truth;
  for (int k = 0; k < sc.steps; ++k) {
    x = step_target(built.model, x, sample_process_noise(built.model.Q, proc_rng));
    y_per_step[k].resize(6);
    for (int i = 0; i < 6; ++i)
      y_per_step[k][i] =
          measure_linear(built.tdoa, built.net, i, x.head<3>(), sc.r, meas_rng) -
          built.tdoa.bias[i];
  }

  NetworkFilter filter(built.net, built.model, built.tdoa, built.gains, profile, init);
  AugmentedSystem sys = build_augmented_WF(built.net, built.net.W, built.model.F, profile);
  std::vector<VecX> aug = augmented_recursion(sys, built.gains, built.tdoa, y_per_step, init);

  double worst = 0.0;
  for (int k = 0; k < sc.steps; ++k) {
    const std::vector<Vec6>& post = filter.step(y_per_step[k]);
    for (int i = 0; i < 6; ++i)
      worst = std::max(worst, (post[i] - aug[k].segment<6>(6 * i)).cwiseAbs().maxCoeff());
  }
  double secs = seconds_since(t0);
  Outcome out;
  out.pass = hetero && worst < 1e-9 && secs < 5.0;
  out.detail = "max deviation " + fmt(worst) + " (tol 1e-9), heterogeneous profile " +
               (hetero ? "yes" : "NO") + ", " + fmt(secs) + " s (limit 5)";
  return out;
}

// ---- 2: unit spectral radii of the open-loop pieces ----
Outcome criterion_2() {
  double worst_f = 0.0;
  for (double T : {0.1, 0.5, 1.0})
    worst_f = std::max(worst_f, std::abs(spectral_radius(build_ncv(T, Mat3::Zero()).F) - 1.0));

  SensorNetwork cyc = build_topology(Topology::cycle, 6);
  design_weights(cyc);
  SensorNetwork com = build_topology(Topology::complete, 4);
  design_weights(com);
  double worst_w = std::max(std::abs(spectral_radius(cyc.W) - 1.0),
                            std::abs(spectral_radius(com.W) - 1.0));
  double worst_wf =
      std::abs(spectral_radius(kron(cyc.W, build_ncv(1.0, Mat3::Zero()).F)) - 1.0);

  Outcome out;
  out.pass = worst_f < 1e-9 && worst_w < 1e-10 && worst_wf < 1e-9;
  out.detail = "|rho(F)-1| " + fmt(worst_f) + " (tol 1e-9), |rho(W)-1| " + fmt(worst_w) +
               " (tol 1e-10), |rho(W kron F)-1| " + fmt(worst_wf) + " (tol 1e-9)";
  return out;
}

// ---- 3: exact slice partition and block templates over random pairs ----
Outcome criterion_3() {
  Mat6 F = build_ncv(1.0, Mat3::Zero()).F;
  int checked = 0;
  double worst_sum = 0.0, worst_row = 0.0;
  bool templates_ok = true;
  for (int rep = 0; rep < 50; ++rep) {
    SensorNetwork net = (rep % 2 == 0) ? build_topology(Topology::cycle, 6)
                                       : build_topology(Topology::complete, 4);
    design_weights(net, WeightRule::randomized_stochastic, 0.0, 1000 + rep);
    int tau_bar = rep % 6;
    Rng drng(2000 + rep);
    DelayProfile p = assign_delays(net, DelayScheme::uniform_random, tau_bar, drng);
    const int N = net.N, L = tau_bar + 1, n = kStateDim;

    MatX sum = MatX::Zero(N, N);
    for (int r = 0; r <= tau_bar; ++r) sum += build_W_r(net, net.W, p, r);
    worst_sum = std::max(worst_sum, (sum - net.W).cwiseAbs().maxCoeff());  // must be exactly 0

    MatX Wbar = build_augmented_W(net, net.W, p);
    for (int i = 0; i < N; ++i) worst_row = std::max(worst_row, std::abs(Wbar.row(i).sum() - 1.0));
    for (int br = 1; br < L && templates_ok; ++br)
      for (int bc = 0; bc < L && templates_ok; ++bc) {
        MatX blk = Wbar.block(N * br, N * bc, N, N);
        templates_ok = (bc == br - 1) ? blk.isIdentity(0.0) : blk.isZero(0.0);
      }
    for (int r = 0; r <= tau_bar && templates_ok; ++r)
      templates_ok =
          (Wbar.block(0, N * r, N, N) - build_W_r(net, net.W, p, r)).cwiseAbs().maxCoeff() == 0.0;

    AugmentedSystem sys = build_augmented_WF(net, net.W, F, p);
    for (int r = 0; r <= tau_bar && templates_ok; ++r)
      templates_ok = (sys.WF_bar.block(0, N * n * r, N * n, N * n) -
                      kron(build_W_r(net, net.W, p, r), matrix_power(F, r + 1)))
                         .cwiseAbs()
                         .maxCoeff() == 0.0;
    for (int br = 1; br < L && templates_ok; ++br)
      for (int bc = 0; bc < L && templates_ok; ++bc) {
        MatX blk = sys.WF_bar.block(N * n * br, N * n * bc, N * n, N * n);
        templates_ok = (bc == br - 1) ? blk.isIdentity(0.0) : blk.isZero(0.0);
      }
    ++checked;
  }
  Outcome out;
  out.pass = checked == 50 && worst_sum == 0.0 && worst_row < 1e-12 && templates_ok;
  out.detail = std::to_string(checked) + " pairs, max |sum W_r - W| " + fmt(worst_sum) +
               " (must be 0), max row-sum error " + fmt(worst_row) +
               " (tol 1e-12), block templates " + (templates_ok ? "exact" : "VIOLATED");
  return out;
}

// shared by 4 and 5: the built-in design on the seeded benchmark network
struct DesignedCase {
  SensorNetwork net;
  Mat6 F;
  MatX dh_bar;
  GainSet gains;
  LinearTdoaModel tdoa;
};

DesignedCase designed_case() {
  DesignedCase d;
  d.net = build_topology(Topology::cycle, 6);
  Rng prng(18);
  place_sensors(d.net, random_positions(6, 0.0, 10.0, prng));
  design_weights(d.net, WeightRule::randomized_stochastic, 0.0, 2024);
  d.F = build_ncv(1.0, Mat3::Zero()).F;
  d.tdoa = build_linear_model(d.net);
  d.dh_bar = build_dh_bar(d.tdoa);
  d.gains = design_gains(d.net.W, d.F, d.tdoa);
  return d;
}

// ---- 4: the built-in gain search stabilizes, delay-free and at bound 8 ----
Outcome criterion_4() {
  auto t0 = std::chrono::steady_clock::now();
  DesignedCase d = designed_case();
  double rho_free = build_closed_loop(d.net.W, d.F, d.gains, d.dh_bar).rho;
  Rng unused(0);
  DelayProfile p8 = assign_delays(d.net, DelayScheme::constant, 8, unused);
  double rho_aug8 = build_closed_loop(d.net, d.net.W, d.F, d.gains, d.dh_bar, p8).rho;
  double secs = seconds_since(t0);
  Outcome out;
  out.pass = rho_free < 1.0 && rho_aug8 < 1.0 && secs < 60.0;
  out.detail = "rho_free " + fmt(rho_free) + ", rho_aug(8) " + fmt(rho_aug8) +
               " (both < 1), " + fmt(secs) + " s (limit 60)";
  return out;
}

// ---- 5: bound-search output honored by directly built delayed loops ----
Outcome criterion_5() {
  DesignedCase d = designed_case();
  std::optional<int> bound = max_delay_bound(d.net.W, d.F, d.gains, d.dh_bar, 20);
  Outcome out;
  if (!bound) {
    out.detail = "bound search returned none at cap 20";
    return out;
  }
  double worst_uniform = 0.0;
  Rng unused(0);
  for (int tau = 0; tau <= *bound; ++tau) {
    DelayProfile p = assign_delays(d.net, DelayScheme::constant, tau, unused);
    worst_uniform =
        std::max(worst_uniform, build_closed_loop(d.net, d.net.W, d.F, d.gains, d.dh_bar, p).rho);
  }
  double worst_hetero = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    Rng drng(7000 + rep);
    DelayProfile p = assign_delays(d.net, DelayScheme::uniform_random, *bound, drng);
    worst_hetero =
        std::max(worst_hetero, build_closed_loop(d.net, d.net.W, d.F, d.gains, d.dh_bar, p).rho);
  }
  out.pass = worst_uniform < 1.0 && worst_hetero < 1.0;
  out.detail = "bound " + std::to_string(*bound) + ", worst uniform rho " + fmt(worst_uniform) +
               ", worst heterogeneous rho over 20 profiles " + fmt(worst_hetero) + " (both < 1)";
  return out;
}

// ---- 6: noise-free error norm must contract by 1e-6 within 400 steps ----
Outcome criterion_6() {
  Outcome out;
  out.pass = true;
  std::string parts;
  for (int tau_bar : {0, 8, 20}) {
    Scenario sc = reference_scenario();
    sc.q = 0.0;
    sc.r = 0.0;
    sc.steps = 400;
    sc.delays.tau_bar = tau_bar;
    BuiltScenario built = build_scenario(sc);
    DelayProfile profile = scenario_delays(sc, built);

    std::uint64_t trial_seed = Rng::derive(sc.master_seed, 1);
    Rng init_rng(Rng::derive(trial_seed, 0));
    Vec6 truth;
    for (int c = 0; c < 3; ++c) truth(c) = init_rng.uniform(0.0, sc.init.position_box);
    truth.tail<3>() = sc.init.speed_sigma * init_rng.normal3();
    std::vector<Vec6> init(6);
    double e0 = 0.0;
    for (auto& v : init) {
      v = truth + sc.init.perturbation * init_rng.normal6();
      e0 += (truth - v).squaredNorm();
    }
    e0 = std::sqrt(e0);

    NetworkFilter filter(built.net, built.model, built.tdoa, built.gains, profile, init);
    double best_ratio = 1e300;
    for (int k = 1; k <= sc.steps; ++k) {
      truth = step_target(built.model, truth, Vec3::Zero());
      std::vector<VecX> y(6);
      for (int i = 0; i < 6; ++i) y[i] = built.tdoa.H[i] * truth;
      const std::vector<Vec6>& post = filter.step(y);
      double norm = 0.0;
      for (int i = 0; i < 6; ++i) norm += (truth - post[i]).squaredNorm();
      best_ratio = std::min(best_ratio, std::sqrt(norm) / e0);
    }
    bool leg_ok = best_ratio < 1e-6;
    out.pass = out.pass && leg_ok;
    parts += "tau " + std::to_string(tau_bar) + ": best ratio " + fmt(best_ratio) + "; ";
  }
  out.detail = parts + "(need < 1e-6 each within 400 steps)";
  return out;
}

// ---- 7: noisy Monte Carlo stays bounded and comparable across bounds ----
Outcome criterion_7() {
  Scenario sc = reference_scenario();
  sc.steps = 200;
  sc.trials = 10;

  sc.delays.tau_bar = 0;
  BuiltScenario b0 = build_scenario(sc);
  MonteCarloReport r0 = run_monte_carlo(sc, b0);
  sc.delays.tau_bar = 20;
  BuiltScenario b20 = build_scenario(sc);
  MonteCarloReport r20 = run_monte_carlo(sc, b20);

  double ratio = r20.aggregate_steady_state_mse / r0.aggregate_steady_state_mse;
  Outcome out;
  out.pass = !r0.any_diverged && !r20.any_diverged && ratio <= 10.0;
  out.detail = "steady-state MSE no-delay " + fmt(r0.aggregate_steady_state_mse) + ", bound-20 " +
               fmt(r20.aggregate_steady_state_mse) + ", ratio " + fmt(ratio) +
               " (tol 10x), diverged " +
               ((r0.any_diverged || r20.any_diverged) ? "YES" : "none");
  return out;
}

// ---- 8: affine measurement identity over random geometries; static rows ----
Outcome criterion_8() {
  Rng rng(314159);
  double worst = 0.0;
  int evaluated = 0;
  for (int it = 0; it < 10000; ++it) {
    Vec3 pi = 10.0 * rng.normal3();
    Vec3 pj = 10.0 * rng.normal3();
    Vec3 p = 10.0 * rng.normal3();
    if ((pi - pj).norm() <= 1e-6) continue;
    Vec6 x;
    x << p(0), p(1), p(2), rng.normal(), rng.normal(), rng.normal();
    double lhs = squared_range_diff(p, pi, pj);
    double rhs = linear_row(pi, pj) * x + linear_bias(pi, pj);
    worst = std::max(worst, std::abs(lhs - rhs));
    ++evaluated;
  }

  Scenario sc = reference_scenario();
  BuiltScenario built = build_scenario(sc);
  LinearTdoaModel rebuilt = build_linear_model(built.net);
  bool static_rows = true;
  for (int i = 0; i < 6; ++i) {
    static_rows = static_rows && (rebuilt.H[i] - built.tdoa.H[i]).cwiseAbs().maxCoeff() == 0.0;
    static_rows = static_rows && (rebuilt.bias[i] - built.tdoa.bias[i]).cwiseAbs().maxCoeff() == 0.0;
  }
  Outcome out;
  out.pass = evaluated >= 9990 && worst < 1e-10 && static_rows;
  out.detail = std::to_string(evaluated) + " geometries, max identity error " + fmt(worst) +
               " (tol 1e-10), rows bit-stable " + (static_rows ? "yes" : "NO");
  return out;
}

// ---- 9: linear model beats the relinearized one on shared noise ----
Outcome criterion_9() {
  Scenario sc = reference_scenario();
  sc.steps = 200;
  sc.trials = 10;
  BuiltScenario built = build_scenario(sc);
  ModelComparison cmp = compare_models(sc, built, PositionSource::estimated);
  Outcome out;
  out.pass = cmp.linear_wins >= 8;
  out.detail = "linear steady-state MSE <= relinearized in " + std::to_string(cmp.linear_wins) +
               " / 10 trials (need >= 8)";
  return out;
}

// ---- 10: the simulate verb is byte-deterministic end to end ----
Outcome criterion_10() {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "dtrack_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  std::string config = std::string(DTRACK_CONFIG_DIR) + "/reference_scenario.json";
  Outcome out;
  for (int run = 0; run < 2; ++run) {
    std::string cmd = std::string("\"") + DTRACK_CLI_PATH + "\" simulate \"" + config +
                      "\" --out \"" + (base / ("run" + std::to_string(run))).string() +
                      "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      out.detail = "simulate invocation failed";
      return out;
    }
  }
  bool identical = true;
  std::string differing;
  for (const char* f : {"trajectory.csv", "mse.csv", "target_path.csv", "report.json"}) {
    std::string a = read_text_file((base / "run0" / f).string());
    std::string b = read_text_file((base / "run1" / f).string());
    if (a != b) {
      identical = false;
      differing += std::string(f) + " ";
    }
  }
  out.pass = identical;
  out.detail = identical ? "two runs, four output files each, all byte-identical"
                         : ("differing files: " + differing);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }
  Outcome (*checks[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                           criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  int failures = 0;
  for (int n = 1; n <= 10; ++n) {
    if (only != 0 && n != only) continue;
    Outcome res;
    try {
      res = checks[n - 1]();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s\n", res.pass ? "PASS" : "FAIL", n, res.detail.c_str());
    if (!res.pass) ++failures;
  }
  return failures;
}
