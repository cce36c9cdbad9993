// Acceptance suite: one pass/fail line per criterion, exercising the full
// pipeline at the tolerances promised by the project. Run all criteria with
// no arguments, or a single one with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qsg/csv.hpp"
#include "qsg/estimators.hpp"
#include "qsg/protocol.hpp"
#include "qsg/stats.hpp"
#include "qsg/theory.hpp"

using namespace qsg;

namespace {

unsigned g_workers = 0;

struct Outcome {
  bool pass;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Soft neutrality: symmetric start never breaks symmetry.

Outcome soft_neutrality() {
  double worst = 0.0;
  for (double alpha : {0.2, 1.0}) {
    SimConfig config;
    config.population = 24;
    config.label_count = 10;
    config.adaptation_rate = alpha;
    config.channel = ChannelSpec::soft();
    config.horizon = 100000;
    config.probe_every = 1000;
    config.seed = 101;
    const Trajectory traj = run(config);
    for (const auto& probe : traj.probes)
      worst = std::max(worst, std::abs(probe.record.polarization - 0.1));
  }
  std::ostringstream detail;
  detail << "max |U - 1/K| = " << worst;
  return {worst <= 1e-9, detail.str()};
}

// ---------------------------------------------------------------------------
// 2. One-step drift at the symmetric state matches a^2 (1 - 1/K) / N^2.

Outcome symmetric_drift_value() {
  const PopulationState state = PopulationState::symmetric(24, 10);
  const EstimateWithError est =
      one_step_drift(state, ChannelSpec::hard(), 0.5, 1000000, RandomSource(202), g_workers);
  const double target = 3.90625e-4;
  const double tolerance = 3.0 * est.std_error + 1e-12;
  std::ostringstream detail;
  detail << "measured " << est.value << " +/- " << est.std_error << ", target " << target;
  return {std::abs(est.value - target) <= tolerance, detail.str()};
}

// ---------------------------------------------------------------------------
// 3. Normalized excess drift versus 1/m: through-origin slope within 5% of
//    (1 - 1/K), each point within 3 sigma.

Outcome bandwidth_scaling() {
  const PopulationState state = PopulationState::symmetric(24, 10);
  const double alpha = 0.5;
  const double scale = 576.0 / (alpha * alpha);  // N^2 / a^2
  double sxy = 0.0, sxx = 0.0;
  bool points_ok = true;
  std::ostringstream detail;
  for (int m : {1, 2, 3, 5, 10, 20}) {
    const ExcessDriftResult result = excess_drift(state, ChannelSpec::top_m(m), alpha,
                                                  400000, RandomSource(300 + m), g_workers);
    const double x = 1.0 / m;
    const double y = result.measured.value * scale;
    const double band = 3.0 * result.measured.std_error * scale + 1e-9;
    if (std::abs(y - 0.9 * x) > band) points_ok = false;
    sxy += x * y;
    sxx += x * x;
  }
  const double slope = sxy / sxx;
  detail << "through-origin slope " << slope << " (target 0.9 +/- 5%)";
  const bool slope_ok = std::abs(slope - 0.9) <= 0.045;
  return {slope_ok && points_ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 4. Measured vs predicted excess drift on heterogeneous snapshots: pulls.

Outcome drift_identity_snapshots() {
  SimConfig config;
  config.population = 24;
  config.label_count = 10;
  config.adaptation_rate = 0.5;
  config.channel = ChannelSpec::hard();
  config.horizon = 1;
  config.seed = 404;

  const int count = 32;
  const double t_min = 24.0;
  const double t_max = 2304.0;  // one characteristic time; q spans ~0.27 to ~0.99
  int within = 0;
  double worst = 0.0;
  for (int j = 0; j < count; ++j) {
    const double frac = static_cast<double>(j) / (count - 1);
    const long t = static_cast<long>(
        std::llround(std::exp(std::log(t_min) + frac * (std::log(t_max) - std::log(t_min)))));
    const PopulationState snapshot =
        drift_snapshot(config, t, 0.999, static_cast<std::uint64_t>(j));
    const ExcessDriftResult result =
        excess_drift(snapshot, config.channel, config.adaptation_rate, 300000,
                     RandomSource(500 + j), g_workers);
    const double pull =
        (result.measured.value - result.predicted) / result.measured.std_error;
    worst = std::max(worst, std::abs(pull));
    within += std::abs(pull) <= 3.0;
  }
  std::ostringstream detail;
  detail << within << "/" << count << " pulls within +/-3, worst |pull| = " << worst;
  return {static_cast<double>(within) >= 0.95 * count, detail.str()};
}

// ---------------------------------------------------------------------------
// 5. Ensemble-mean polarization tracks the mean-field curve with true alpha.

Outcome meanfield_trajectory() {
  SimConfig config;
  config.population = 24;
  config.label_count = 10;
  config.adaptation_rate = 0.2;
  config.channel = ChannelSpec::hard();
  config.horizon = 14400;  // one characteristic time m N^2 / a^2
  config.probe_every = 72;
  config.seed = 505;
  // The band tests the ensemble mean; 200 trials leave per-probe noise of
  // ~0.012 which the max-over-probes statistic inflates past the band even
  // when the true curve is well inside it. 2000 trials pin the mean down
  // (runtime is seconds either way).
  const long trials = 2000;
  const EnsembleResult ensemble = run_ensemble(config, trials, g_workers, true);

  const std::size_t probes = ensemble.trajectories[0].probes.size();
  double max_dev = 0.0;
  double early_dev = 0.0;
  bool early_recorded = false;
  for (std::size_t p = 0; p < probes; ++p) {
    MomentAccumulator acc;
    for (const auto& traj : ensemble.trajectories)
      acc.add(traj.probes[p].record.polarization);
    const long step = ensemble.trajectories[0].probes[p].step;
    const double predicted = meanfield_u(static_cast<double>(step), 24, 10, 1, 0.2);
    const double dev = acc.mean() - predicted;
    max_dev = std::max(max_dev, std::abs(dev));
    if (!early_recorded && step >= 1440) {  // one tenth of the characteristic time
      early_dev = dev;
      early_recorded = true;
    }
  }
  std::ostringstream detail;
  detail << "max |dev| = " << max_dev << " (band 0.05); early deviation " << early_dev
         << (early_dev <= 0.0 ? " (non-positive)" : " (positive; reported, not gated)");
  return {max_dev < 0.05, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. Median consensus time grows close to N^2.

Outcome consensus_scaling() {
  std::vector<std::pair<double, double>> points;
  std::ostringstream detail;
  for (int n : {8, 12, 16, 24, 32, 48}) {
    SimConfig config;
    config.population = n;
    config.label_count = 3;
    config.adaptation_rate = 0.5;
    config.channel = ChannelSpec::hard();
    config.stop = StopRule::threshold(0.9);
    config.horizon = 160L * n * n;
    config.probe_every = std::max<long>(1, static_cast<long>(n) * n / 50);
    config.seed = 606;
    const EnsembleResult ensemble = run_ensemble(config, 120, g_workers);
    std::vector<long> steps = ensemble.consensus_steps();
    if (static_cast<long>(steps.size()) < 100) {
      detail << "only " << steps.size() << " decided trials at N = " << n;
      return {false, detail.str()};
    }
    std::nth_element(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
    points.push_back({static_cast<double>(n),
                      static_cast<double>(steps[steps.size() / 2])});
  }
  const ScalingFit fit = loglog_fit(points);
  detail << "log-log slope " << fit.slope << " (band [1.7, 2.3]), r^2 " << fit.r_squared;
  return {fit.slope >= 1.7 && fit.slope <= 2.3, detail.str()};
}

// ---------------------------------------------------------------------------
// 7. Pure copying: certain absorption, uniform winners, initial-share law.

Outcome voter_absorption() {
  SimConfig config;
  config.population = 6;
  config.label_count = 3;
  config.adaptation_rate = 1.0;
  config.channel = ChannelSpec::hard();
  config.stop = StopRule::absorption();
  config.horizon = 1000000;
  config.probe_every = 10000;
  config.seed = 707;
  const long trials = 3000;
  const EnsembleResult ensemble = run_ensemble(config, trials, g_workers);
  const bool all_absorbed = ensemble.decided() == trials;

  const auto counts = ensemble.winner_counts();
  const double chi2 = chi_square_uniform(counts);
  const double chi2_critical = 9.21034;  // 1% level, 2 degrees of freedom

  SimConfig skewed = config;
  skewed.init = InitSpec::explicit_states(std::vector<SimplexVector>(
      6, SimplexVector(std::vector<double>{0.75, 0.125, 0.125})));
  skewed.seed = 708;
  const EnsembleResult biased = run_ensemble(skewed, trials, g_workers);
  const double share =
      static_cast<double>(biased.winner_counts()[0]) / static_cast<double>(biased.decided());
  const double band = 3.0 * std::sqrt(0.75 * 0.25 / static_cast<double>(biased.decided()));

  std::ostringstream detail;
  detail << "absorbed " << ensemble.decided() << "/" << trials << ", chi2 " << chi2
         << " (crit 9.21), skewed-init share " << share << " (0.75 +/- " << band << ")";
  return {all_absorbed && chi2 <= chi2_critical && biased.decided() == trials &&
              std::abs(share - 0.75) <= band,
          detail.str()};
}

// ---------------------------------------------------------------------------
// 8. Fixation is logistic in gamma_h = m N h / a.

Outcome fixation_logistic() {
  const double alpha = 0.2, h = 0.01;
  std::vector<double> gammas, estimates;
  bool bands_ok = true;
  std::ostringstream detail;
  detail << "fixation (target):";
  for (int n : {5, 10, 20, 40, 80}) {
    SimConfig config;
    config.population = n;
    config.label_count = 2;
    config.adaptation_rate = alpha;
    config.channel = ChannelSpec::hard().with_bias(h);
    config.stop = StopRule::threshold(0.9);
    config.horizon =
        static_cast<long>(std::llround(12.0 * consensus_time(0.9, 2, n, 1, alpha)));
    config.probe_every = std::max<long>(1, config.horizon / 500);
    config.seed = 808;
    const EnsembleResult ensemble =
        run_ensemble(config, 2000, g_workers, false, static_cast<std::uint64_t>(n) << 32);
    if (ensemble.decided() < 1800) {
      return {false, "too few decided trials at N = " + std::to_string(n)};
    }
    const EstimateWithError est = fixation_estimate(ensemble, 0);
    const double gamma = crossover(n, 1, alpha, h, 1.0).gamma_h;
    const double predicted = fixation_probability(0.5, gamma);
    if (std::abs(est.value - predicted) > 0.08) bands_ok = false;
    gammas.push_back(gamma);
    estimates.push_back(est.value);
    detail << " " << est.value << " (" << predicted << ")";
  }
  const bool monotone = std::is_sorted(estimates.begin(), estimates.end());
  const double rank_corr = rank_correlation(gammas, estimates);
  detail << (monotone ? "; monotone in gamma" : "; NOT monotone") << ", rank corr "
         << rank_corr;
  return {bands_ok && monotone && rank_corr > 0.9, detail.str()};
}

// ---------------------------------------------------------------------------
// 9. Tempering orders polarization speed: T = 0.8 faster, T = 1.25 slower.

Outcome temper_crossover() {
  const double delta = 0.01;
  const long probe_step = 20000;  // 100 population rounds
  const long trials = 160;
  std::vector<double> means, ses;
  for (double t : {0.8, 1.0, 1.25}) {
    SimConfig config;
    config.population = 200;
    config.label_count = 2;
    config.adaptation_rate = 0.2;
    config.channel = t == 1.0 ? ChannelSpec::hard() : ChannelSpec::hard().with_temperature(t);
    config.init = InitSpec::explicit_states(std::vector<SimplexVector>(
        200, SimplexVector(std::vector<double>{0.5 + delta, 0.5 - delta})));
    config.horizon = probe_step;
    config.probe_every = probe_step;
    config.seed = 909;
    const EnsembleResult ensemble = run_ensemble(config, trials, g_workers, true,
                                                 static_cast<std::uint64_t>(t * 100) << 32);
    MomentAccumulator acc;
    for (const auto& traj : ensemble.trajectories)
      acc.add(traj.probes.back().record.polarization);
    means.push_back(acc.mean());
    ses.push_back(acc.std_error());
  }
  const double hot_gap = means[0] - means[1];
  const double hot_se = std::sqrt(ses[0] * ses[0] + ses[1] * ses[1]);
  const double cold_gap = means[1] - means[2];
  const double cold_se = std::sqrt(ses[1] * ses[1] + ses[2] * ses[2]);
  std::ostringstream detail;
  detail << "mean U at t*: T=0.8 -> " << means[0] << ", T=1 -> " << means[1]
         << ", T=1.25 -> " << means[2] << "; gaps " << hot_gap << " (3se " << 3.0 * hot_se
         << "), " << cold_gap << " (3se " << 3.0 * cold_se << ")";
  return {hot_gap > 3.0 * hot_se && cold_gap > 3.0 * cold_se, detail.str()};
}

// ---------------------------------------------------------------------------
// 10. Soft disagreement contraction and coordination drift, over (N, alpha).

Outcome soft_contraction_and_s_drift() {
  double worst_v = 0.0, worst_s = 0.0;
  int cell = 0;
  for (int n : {2, 8, 24}) {
    for (double alpha : {0.2, 0.5, 1.0}) {
      RandomSource init(1000 + cell);
      const PopulationState state = PopulationState::dirichlet(n, 3, 1.0, init);
      const double v = disagreement(state);
      const MomentDrift drift = one_step_moment_drift(state, ChannelSpec::soft(), alpha,
                                                      300000, RandomSource(1100 + cell),
                                                      g_workers);
      ++cell;
      const double v_target = soft_v_contraction(v, n, alpha);
      const double s_target = s_drift(v, n, alpha);
      // Deterministic cells (N = 2) leave se at machine epsilon; the band
      // gets a rounding floor so exact agreement is not rejected.
      auto pull = [](const EstimateWithError& est, double target) {
        const double floor = 1e-12 * (1.0 + std::abs(target));
        return std::abs(est.value - target) / (est.std_error + floor / 3.0);
      };
      worst_v = std::max(worst_v, pull(drift.disagreement, v_target));
      worst_s = std::max(worst_s, pull(drift.coordination, s_target));
    }
  }
  std::ostringstream detail;
  detail << "worst |pull|: dV " << worst_v << ", dS " << worst_s << " (band 3)";
  return {worst_v <= 3.0 && worst_s <= 3.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 11. The naming harness driven by exact-belief bridges is statistically
//     indistinguishable from the gossip dynamics.

Outcome harness_equivalence() {
  const int n = 8, k = 3;
  const long trials = 200;

  SimConfig sim;
  sim.population = n;
  sim.label_count = k;
  sim.adaptation_rate = 1.0;
  sim.channel = ChannelSpec::hard();
  sim.stop = StopRule::absorption();
  sim.horizon = 1000000;
  sim.probe_every = 10000;
  sim.seed = 1111;
  const EnsembleResult sim_runs = run_ensemble(sim, trials, g_workers);
  std::vector<double> sim_times;
  for (long t : sim_runs.consensus_steps()) sim_times.push_back(static_cast<double>(t));

  NndConfig nnd;
  nnd.population = n;
  nnd.label_count = k;
  nnd.bandwidth = 1;
  nnd.memory_capacity = 1;
  nnd.horizon = 1000000;
  nnd.probe_every = 10000;
  nnd.stop = StopRule::absorption();
  nnd.seed = 2222;
  std::vector<double> nnd_times;
  for (long t = 0; t < trials; ++t) {
    const NndTrajectory traj = run_nnd(
        nnd,
        [&](int) { return std::make_unique<SimplexBridgeAgent>(uniform_vector(k), 1.0); },
        static_cast<std::uint64_t>(t));
    if (traj.terminal.consensus_step)
      nnd_times.push_back(static_cast<double>(*traj.terminal.consensus_step));
  }

  if (sim_times.size() != static_cast<std::size_t>(trials) ||
      nnd_times.size() != static_cast<std::size_t>(trials)) {
    return {false, "not every trial absorbed"};
  }
  const KsResult ks = ks_two_sample(sim_times, nnd_times);
  std::ostringstream detail;
  detail << "KS D = " << ks.statistic << ", p = " << ks.p_value << " (reject below 0.01)";
  return {ks.p_value > 0.01, detail.str()};
}

// ---------------------------------------------------------------------------
// 12. Scope note: desk-scale substitution documented in the README.

Outcome readme_scope_note() {
#ifdef QSG_SOURCE_DIR
  const std::string readme_path = std::string(QSG_SOURCE_DIR) + "/README.md";
#else
  const std::string readme_path = "README.md";
#endif
  std::ifstream in(readme_path);
  if (!in) return {false, "README.md not found"};
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const bool has_scope = text.find("desk scale") != std::string::npos &&
                         text.find("language-model") != std::string::npos;
  return {has_scope, has_scope ? "README documents the desk-scale scope"
                               : "README scope note missing"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> body;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "soft neutrality", soft_neutrality},
      {2, "symmetric one-step drift", symmetric_drift_value},
      {3, "top-m drift scales as 1/m", bandwidth_scaling},
      {4, "drift identity on snapshots", drift_identity_snapshots},
      {5, "mean-field trajectory band", meanfield_trajectory},
      {6, "consensus-time N^2 scaling", consensus_scaling},
      {7, "voter absorption and winner law", voter_absorption},
      {8, "fixation logistic in gamma_h", fixation_logistic},
      {9, "temperature crossover ordering", temper_crossover},
      {10, "soft V contraction and S drift", soft_contraction_and_s_drift},
      {11, "harness/dynamics equivalence", harness_equivalence},
      {12, "desk-scale scope documented", readme_scope_note},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
      g_workers = static_cast<unsigned>(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N] [--workers W]\n", argv[0]);
      return 2;
    }
  }

  bool all_pass = true;
  for (const Criterion& criterion : criteria()) {
    if (only != 0 && criterion.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.body();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s — %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL",
                criterion.id, criterion.name, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
