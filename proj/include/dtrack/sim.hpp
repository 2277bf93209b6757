#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtrack/baseline_kf.hpp"
#include "dtrack/scenario.hpp"

namespace dtrack {

struct TrialResult {
  MatX truth;               // steps x 6, x_1 .. x_steps
  MatX errors;              // steps x (N*6), truth minus posterior per node
  std::vector<double> mse;  // network MSE per step, averaged over nodes and states
  double steady_state_mse = 0.0;  // mean over the final quartile of steps
  double max_error = 0.0;         // largest absolute error component seen
  bool diverged = false;
};

struct AnalysisBlock {
  double rho_consensus = 0.0;  // rho(W)
  double rho_free = 0.0;       // delay-free closed loop
  double rho_aug = 0.0;        // augmented closed loop at the scenario's profile
  std::optional<int> tau_star; // largest verified uniform-delay bound, cap 20
  bool observable = false;
  bool detectable = false;
  int rank = 0;
  int dim = 0;
};

// delay profile is drawn from the master seed only, so trial count changes
// never move it
DelayProfile scenario_delays(const Scenario& sc, const BuiltScenario& built);

AnalysisBlock analyze_scenario(const Scenario& sc, const BuiltScenario& built);

TrialResult run_trial(const Scenario& sc, const BuiltScenario& built, int trial_index);

struct MonteCarloReport {
  Json config;  // effective scenario echo
  AnalysisBlock analysis;
  std::vector<TrialResult> trials;
  std::vector<double> mean_mse;  // per step, averaged over trials
  double aggregate_steady_state_mse = 0.0;
  bool any_diverged = false;
};

MonteCarloReport run_monte_carlo(const Scenario& sc, const BuiltScenario& built);

Json analysis_json(const AnalysisBlock& a);
Json report_json(const MonteCarloReport& report);

// trajectory.csv, mse.csv, target_path.csv (trial 0), report.json
void emit_results(const MonteCarloReport& report, const std::string& out_dir);

struct BoundSweepRow {
  int tau = 0;
  double rho = 0.0;
};

struct BoundSweep {
  std::vector<BoundSweepRow> rows;  // stops after the first unstable tau
  std::optional<int> tau_star;
  int cap = 20;
};

BoundSweep bound_sweep(const BuiltScenario& built, int cap = 20);

struct ModelComparison {
  std::vector<double> linear_ss;      // steady-state MSE per trial
  std::vector<double> nonlinear_ss;
  std::vector<double> linear_mse;     // per step, mean over trials
  std::vector<double> nonlinear_mse;
  int linear_wins = 0;  // trials where linear <= nonlinear steady state
  bool any_diverged = false;
};

// centralized baselines on identical per-trial noise
ModelComparison compare_models(const Scenario& sc, const BuiltScenario& built,
                               PositionSource source = PositionSource::estimated);

// model_mse.csv + model_summary.json
void emit_comparison(const ModelComparison& cmp, const Scenario& sc, const std::string& out_dir);

}  // namespace dtrack
