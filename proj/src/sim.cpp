#include "dtrack/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "dtrack/filter_core.hpp"
#include "dtrack/io.hpp"

namespace dtrack {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double final_quartile_mean(const std::vector<double>& mse) {
  int steps = static_cast<int>(mse.size());
  if (steps == 0) return 0.0;
  int q = std::max(1, steps / 4);
  double acc = 0.0;
  for (int k = steps - q; k < steps; ++k) acc += mse[k];
  return acc / q;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

DelayProfile scenario_delays(const Scenario& sc, const BuiltScenario& built) {
  Rng rng(Rng::derive(sc.master_seed, 0));
  return assign_delays(built.net, sc.delays.scheme, sc.delays.tau_bar, rng, sc.delays.per_link);
}

AnalysisBlock analyze_scenario(const Scenario& sc, const BuiltScenario& built) {
  AnalysisBlock a;
  a.rho_consensus = spectral_radius(built.net.W);
  a.rho_free = build_closed_loop(built.net.W, built.model.F, built.gains, built.dh_bar).rho;
  DelayProfile profile = scenario_delays(sc, built);
  a.rho_aug =
      build_closed_loop(built.net, built.net.W, built.model.F, built.gains, built.dh_bar, profile)
          .rho;
  a.tau_star = max_delay_bound(built.net.W, built.model.F, built.gains, built.dh_bar, 20);
  ObservabilityReport obs =
      check_distributed_observability(built.net.W, built.model.F, built.dh_bar);
  a.observable = obs.observable;
  a.detectable = obs.detectable;
  a.rank = obs.rank;
  a.dim = obs.dim;
  return a;
}

TrialResult run_trial(const Scenario& sc, const BuiltScenario& built, int trial_index) {
  const int N = built.net.N;
  const int steps = sc.steps;
  DelayProfile profile = scenario_delays(sc, built);

  std::uint64_t trial_seed = Rng::derive(sc.master_seed, 1 + static_cast<std::uint64_t>(trial_index));
  Rng init_rng(Rng::derive(trial_seed, 0));
  Vec6 truth;
  for (int i = 0; i < 3; ++i) truth(i) = init_rng.uniform(0.0, sc.init.position_box);
  truth.tail<3>() = sc.init.speed_sigma * init_rng.normal3();
  std::vector<Vec6> init(N);
  for (int i = 0; i < N; ++i) init[i] = truth + sc.init.perturbation * init_rng.normal6();

  Rng proc_rng(Rng::derive(trial_seed, 1));
  Rng meas_rng(Rng::derive(trial_seed, 2));

  NetworkFilter filter(built.net, built.model, built.tdoa, built.gains, profile, init);

  TrialResult tr;
  tr.truth = MatX::Zero(steps, kStateDim);
  tr.errors = MatX::Zero(steps, N * kStateDim);
  tr.mse.assign(steps, 0.0);

  for (int k = 0; k < steps; ++k) {
    truth = step_target(built.model, truth, sample_process_noise(built.model.Q, proc_rng));
    std::vector<VecX> y(N);
    for (int i = 0; i < N; ++i)
      y[i] = measure_linear(built.tdoa, built.net, i, truth.head<3>(), sc.r, meas_rng) -
             built.tdoa.bias[i];
    const std::vector<Vec6>& post = filter.step(y);

    tr.truth.row(k) = truth.transpose();
    double acc = 0.0;
    bool finite = true;
    for (int i = 0; i < N; ++i) {
      Vec6 e = truth - post[i];
      tr.errors.block(k, i * kStateDim, 1, kStateDim) = e.transpose();
      acc += e.squaredNorm();
      finite = finite && e.allFinite();
      if (finite) tr.max_error = std::max(tr.max_error, e.cwiseAbs().maxCoeff());
    }
    tr.mse[k] = acc / (N * kStateDim);
    if (!finite) {
      tr.diverged = true;
      if (k + 1 < steps) {
        tr.errors.bottomRows(steps - k - 1).setConstant(kNan);
        tr.truth.bottomRows(steps - k - 1).setConstant(kNan);
        std::fill(tr.mse.begin() + k + 1, tr.mse.end(), kNan);
      }
      break;
    }
  }
  if (tr.diverged) {
    tr.steady_state_mse = std::numeric_limits<double>::infinity();
    tr.max_error = std::numeric_limits<double>::infinity();
  } else {
    tr.steady_state_mse = final_quartile_mean(tr.mse);
  }
  return tr;
}

MonteCarloReport run_monte_carlo(const Scenario& sc, const BuiltScenario& built) {
  MonteCarloReport rep;
  rep.config = effective_config(sc);
  rep.analysis = analyze_scenario(sc, built);
  rep.trials.reserve(sc.trials);
  for (int t = 0; t < sc.trials; ++t) rep.trials.push_back(run_trial(sc, built, t));

  rep.mean_mse.assign(sc.steps, 0.0);
  for (int k = 0; k < sc.steps; ++k) {
    double acc = 0.0;
    for (const TrialResult& tr : rep.trials) acc += tr.mse[k];
    rep.mean_mse[k] = rep.trials.empty() ? 0.0 : acc / static_cast<double>(rep.trials.size());
  }
  rep.aggregate_steady_state_mse = final_quartile_mean(rep.mean_mse);
  for (const TrialResult& tr : rep.trials) rep.any_diverged = rep.any_diverged || tr.diverged;
  return rep;
}

Json analysis_json(const AnalysisBlock& a) {
  Json j;
  j["rho_consensus"] = a.rho_consensus;
  j["rho_free"] = a.rho_free;
  j["rho_aug"] = a.rho_aug;
  j["tau_star"] = a.tau_star ? Json(*a.tau_star) : Json(nullptr);
  j["observable"] = a.observable;
  j["detectable"] = a.detectable;
  j["obs_rank"] = a.rank;
  j["obs_dim"] = a.dim;
  return j;
}

Json report_json(const MonteCarloReport& report) {
  Json j;
  j["config"] = report.config;
  j["analysis"] = analysis_json(report.analysis);
  Json per_trial = Json::array();
  for (size_t t = 0; t < report.trials.size(); ++t) {
    const TrialResult& tr = report.trials[t];
    Json e;
    e["trial"] = t;
    e["steady_state_mse"] = finite_or_null(tr.steady_state_mse);
    e["max_error"] = finite_or_null(tr.max_error);
    e["diverged"] = tr.diverged;
    per_trial.push_back(e);
  }
  Json summary;
  summary["trials"] = report.trials.size();
  summary["steps"] = report.mean_mse.size();
  summary["steady_state_mse"] = finite_or_null(report.aggregate_steady_state_mse);
  summary["final_mse"] =
      report.mean_mse.empty() ? Json(nullptr) : finite_or_null(report.mean_mse.back());
  summary["any_diverged"] = report.any_diverged;
  summary["per_trial"] = per_trial;
  j["summary"] = summary;
  return j;
}

void emit_results(const MonteCarloReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string base = out_dir + "/";

  std::string traj = "step,trial,sensor,state_index,error\n";
  if (!report.trials.empty()) {
    size_t rows = report.trials.size() * static_cast<size_t>(report.trials[0].errors.rows()) *
                  static_cast<size_t>(report.trials[0].errors.cols());
    traj.reserve(traj.size() + rows * 24);
  }
  for (size_t t = 0; t < report.trials.size(); ++t) {
    const MatX& e = report.trials[t].errors;
    int N = static_cast<int>(e.cols()) / kStateDim;
    for (Eigen::Index k = 0; k < e.rows(); ++k) {
      for (int i = 0; i < N; ++i) {
        for (int s = 0; s < kStateDim; ++s) {
          traj += std::to_string(k + 1);
          traj += ',';
          traj += std::to_string(t);
          traj += ',';
          traj += std::to_string(i);
          traj += ',';
          traj += std::to_string(s);
          traj += ',';
          traj += format_double(e(k, i * kStateDim + s));
          traj += '\n';
        }
      }
    }
  }
  write_text_file(base + "trajectory.csv", traj);

  std::string mse = "step,mean_mse\n";
  for (size_t k = 0; k < report.mean_mse.size(); ++k) {
    mse += std::to_string(k + 1);
    mse += ',';
    mse += format_double(report.mean_mse[k]);
    mse += '\n';
  }
  write_text_file(base + "mse.csv", mse);

  std::string path = "step,x,y,z\n";
  if (!report.trials.empty()) {
    const MatX& truth = report.trials[0].truth;
    for (Eigen::Index k = 0; k < truth.rows(); ++k) {
      path += std::to_string(k + 1);
      for (int c = 0; c < 3; ++c) {
        path += ',';
        path += format_double(truth(k, c));
      }
      path += '\n';
    }
  }
  write_text_file(base + "target_path.csv", path);

  write_text_file(base + "report.json", report_json(report).dump(2) + "\n");
}

BoundSweep bound_sweep(const BuiltScenario& built, int cap) {
  BoundSweep sweep;
  sweep.cap = cap;
  Rng unused(0);
  for (int tau = 0; tau <= cap; ++tau) {
    DelayProfile profile = assign_delays(built.net, DelayScheme::constant, tau, unused);
    double rho =
        build_closed_loop(built.net, built.net.W, built.model.F, built.gains, built.dh_bar, profile)
            .rho;
    sweep.rows.push_back({tau, rho});
    if (rho >= 1.0) break;
    sweep.tau_star = tau;
  }
  return sweep;
}

ModelComparison compare_models(const Scenario& sc, const BuiltScenario& built,
                               PositionSource source) {
  ModelComparison cmp;
  cmp.linear_mse.assign(sc.steps, 0.0);
  cmp.nonlinear_mse.assign(sc.steps, 0.0);
  for (int t = 0; t < sc.trials; ++t) {
    std::uint64_t trial_seed = Rng::derive(sc.master_seed, 1 + static_cast<std::uint64_t>(t));
    KfRunResult lin = kf_linear_tdoa_run(sc, built, trial_seed);
    KfRunResult non = kf_nonlinear_tdoa_run(sc, built, trial_seed, source);
    cmp.linear_ss.push_back(lin.steady_state_mse);
    cmp.nonlinear_ss.push_back(non.steady_state_mse);
    if (lin.steady_state_mse <= non.steady_state_mse) ++cmp.linear_wins;
    cmp.any_diverged = cmp.any_diverged || lin.diverged || non.diverged;
    for (int k = 0; k < sc.steps; ++k) {
      cmp.linear_mse[k] += lin.mse[k] / sc.trials;
      cmp.nonlinear_mse[k] += non.mse[k] / sc.trials;
    }
  }
  return cmp;
}

void emit_comparison(const ModelComparison& cmp, const Scenario& sc, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string base = out_dir + "/";

  std::string csv = "step,linear_mse,nonlinear_mse\n";
  for (size_t k = 0; k < cmp.linear_mse.size(); ++k) {
    csv += std::to_string(k + 1);
    csv += ',';
    csv += format_double(cmp.linear_mse[k]);
    csv += ',';
    csv += format_double(cmp.nonlinear_mse[k]);
    csv += '\n';
  }
  write_text_file(base + "model_mse.csv", csv);

  Json j;
  j["config"] = effective_config(sc);
  Json per_trial = Json::array();
  for (size_t t = 0; t < cmp.linear_ss.size(); ++t) {
    Json e;
    e["trial"] = t;
    e["linear_steady_state_mse"] = finite_or_null(cmp.linear_ss[t]);
    e["nonlinear_steady_state_mse"] = finite_or_null(cmp.nonlinear_ss[t]);
    e["linear_leq"] = cmp.linear_ss[t] <= cmp.nonlinear_ss[t];
    per_trial.push_back(e);
  }
  j["per_trial"] = per_trial;
  j["linear_wins"] = cmp.linear_wins;
  j["trials"] = cmp.linear_ss.size();
  j["any_diverged"] = cmp.any_diverged;
  write_text_file(base + "model_summary.json", j.dump(2) + "\n");
}

}  // namespace dtrack
