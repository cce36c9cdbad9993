// Monte Carlo measurement procedures connecting simulation to theory:
// one-step drift estimates from shared snapshots (optionally paired against
// the Soft baseline), early-slope and consensus-time extraction, fixation
// statistics, log-log scaling fits, and the shared effective-alpha fit.

#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qsg/dynamics.hpp"

namespace qsg {

struct EstimateWithError {
  double value;
  double std_error;
  long n;
};

struct ScalingFit {
  double slope;
  double intercept;
  double r_squared;
  std::vector<std::pair<double, double>> log_points;
};

// Mean and standard error of the one-step polarization change over
// `samples` independent interactions launched from the same snapshot.
// Samples are chunked onto derived rng streams and merged in chunk order,
// so the result is identical for any worker count.
EstimateWithError one_step_drift(const PopulationState& snapshot, const ChannelSpec& channel,
                                 double alpha, long samples, RandomSource rng,
                                 unsigned workers = 0);

// One-step changes of (U, V, S) from a shared snapshot.
struct MomentDrift {
  EstimateWithError polarization;
  EstimateWithError disagreement;
  EstimateWithError coordination;
};
MomentDrift one_step_moment_drift(const PopulationState& snapshot, const ChannelSpec& channel,
                                  double alpha, long samples, RandomSource rng,
                                  unsigned workers = 0);

// Snapshot state for drift measurements: advances a fresh trial to `step`,
// retrying further streams until the state's self-overlap stays at or below
// `max_self_overlap`. Near q = 1 the excess-drift measurement degenerates
// (both sides vanish below double resolution), so drift scans skip
// numerically absorbed states.
PopulationState drift_snapshot(const SimConfig& config, long step, double max_self_overlap,
                               std::uint64_t stream_base = 0);

// Quantized-minus-Soft drift on the same snapshot. Paired mode reuses one
// pair sequence for both channels so the heterogeneity term cancels sample
// by sample. `predicted` carries the variance-injection value
// (a^2 / (m N^2)) (1 - q) for comparison. Soft input is an error.
struct ExcessDriftResult {
  EstimateWithError measured;
  double predicted;
};
ExcessDriftResult excess_drift(const PopulationState& snapshot, const ChannelSpec& quantized,
                               double alpha, long samples, RandomSource rng,
                               unsigned workers = 0, bool paired = true);

// Least-squares slope of U versus step over the first `window` probes.
EstimateWithError early_drift_slope(const Trajectory& trajectory, int window);

// Step of the first probe with U >= u_star; absent if never crossed.
std::optional<long> consensus_time_empirical(const Trajectory& trajectory, double u_star);

// Fraction of decided trials won by `label`, with binomial standard error.
// Undecided trials are excluded from n, never silently recounted.
EstimateWithError fixation_estimate(const EnsembleResult& ensemble, Label label);

// Ordinary least squares on (log x, log y); all inputs must be positive.
ScalingFit loglog_fit(std::span<const std::pair<double, double>> points);

// The single alpha in (0, 1] minimizing the summed squared error between
// probed U(t) and the mean-field curve pooled over all trajectories.
// Golden-section search on a bracketed minimum, with a dense-grid fallback
// when bracketing fails.
struct AlphaFit {
  double alpha;
  double residual;
};
AlphaFit effective_alpha_fit(std::span<const std::pair<int, const Trajectory*>> trajectories,
                             int label_count, int bandwidth);

}  // namespace qsg
