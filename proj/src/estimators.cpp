#include "qsg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qsg/parallel.hpp"
#include "qsg/stats.hpp"
#include "qsg/theory.hpp"

namespace qsg {

namespace {

constexpr long kChunkSize = 1 << 14;

// Inner products needed by the incremental one-step observable deltas.
struct SnapshotView {
  const PopulationState* state;
  SimplexVector mean_vec;
  double alpha;
  int n;
  int k;

  SnapshotView(const PopulationState& s, double a)
      : state(&s), mean_vec(mean(s)), alpha(a), n(s.population()), k(s.label_count()) {}
};

// dU for one interaction (speaker, listener, message), without touching the
// snapshot: dU = 2 (a/N) <mean, y - x_L> + (a/N)^2 |y - x_L|^2.
double delta_u(const SnapshotView& v, int listener, std::span<const double> message) {
  const auto xl = v.state->agent(listener).weights();
  const double scale = v.alpha / v.n;
  double dot = 0.0, norm2 = 0.0;
  for (int c = 0; c < v.k; ++c) {
    const double d = message[static_cast<std::size_t>(c)] - xl[static_cast<std::size_t>(c)];
    dot += v.mean_vec[c] * d;
    norm2 += d * d;
  }
  return 2.0 * scale * dot + scale * scale * norm2;
}

// dV = 2 <x_L - mean, dx> + ((N-1)/N) |dx|^2 with dx = a (y - x_L).
double delta_v(const SnapshotView& v, int listener, std::span<const double> message) {
  const auto xl = v.state->agent(listener).weights();
  double dot = 0.0, norm2 = 0.0;
  for (int c = 0; c < v.k; ++c) {
    const double dx = v.alpha * (message[static_cast<std::size_t>(c)] -
                                 xl[static_cast<std::size_t>(c)]);
    dot += (xl[static_cast<std::size_t>(c)] - v.mean_vec[c]) * dx;
    norm2 += dx * dx;
  }
  return 2.0 * dot + (static_cast<double>(v.n - 1) / v.n) * norm2;
}

// Each chunk owns its rng stream and emit scratch, so tasks share nothing
// mutable and the merged result is identical for any worker count.
template <typename PerSample>
void chunked_samples(long samples, unsigned workers, RandomSource rng, std::size_t label_count,
                     std::vector<MomentAccumulator>& totals, PerSample&& per_sample) {
  const long chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<std::vector<MomentAccumulator>> partial(
      static_cast<std::size_t>(chunks), std::vector<MomentAccumulator>(totals.size()));
  parallel_for(static_cast<std::size_t>(chunks), workers, [&](std::size_t c) {
    RandomSource chunk_rng = rng.split(c);
    detail::EmitScratch scratch;
    scratch.resize(label_count);
    const long begin = static_cast<long>(c) * kChunkSize;
    const long end = std::min(samples, begin + kChunkSize);
    for (long s = begin; s < end; ++s) per_sample(chunk_rng, scratch, partial[c]);
  });
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i].merge(p[i]);
  }
}

EstimateWithError to_estimate(const MomentAccumulator& acc) {
  return {acc.mean(), acc.std_error(), acc.count()};
}

}  // namespace

EstimateWithError one_step_drift(const PopulationState& snapshot, const ChannelSpec& channel,
                                 double alpha, long samples, RandomSource rng,
                                 unsigned workers) {
  if (samples < 1) throw std::invalid_argument("drift estimate needs samples >= 1");
  validate_channel(channel, snapshot.label_count());
  const SnapshotView view(snapshot, alpha);
  std::vector<MomentAccumulator> totals(1);
  chunked_samples(samples, workers, rng, static_cast<std::size_t>(view.k), totals,
                  [&](RandomSource& r, detail::EmitScratch& scratch,
                      std::vector<MomentAccumulator>& acc) {
                    const auto [speaker, listener] = select_pair(view.n, r);
                    const auto msg =
                        detail::emit_raw(snapshot.agent(speaker).weights(), channel, r, scratch);
                    acc[0].add(delta_u(view, listener, msg));
                  });
  return to_estimate(totals[0]);
}

MomentDrift one_step_moment_drift(const PopulationState& snapshot, const ChannelSpec& channel,
                                  double alpha, long samples, RandomSource rng,
                                  unsigned workers) {
  if (samples < 1) throw std::invalid_argument("drift estimate needs samples >= 1");
  validate_channel(channel, snapshot.label_count());
  const SnapshotView view(snapshot, alpha);
  const double pair_scale = static_cast<double>(view.n) * (view.n - 1.0);
  std::vector<MomentAccumulator> totals(3);
  chunked_samples(samples, workers, rng, static_cast<std::size_t>(view.k), totals,
                  [&](RandomSource& r, detail::EmitScratch& scratch,
                      std::vector<MomentAccumulator>& acc) {
                    const auto [speaker, listener] = select_pair(view.n, r);
                    const auto msg =
                        detail::emit_raw(snapshot.agent(speaker).weights(), channel, r, scratch);
                    const double du = delta_u(view, listener, msg);
                    const double dv = delta_v(view, listener, msg);
                    acc[0].add(du);
                    acc[1].add(dv);
                    acc[2].add(du - dv / pair_scale);
                  });
  return {to_estimate(totals[0]), to_estimate(totals[1]), to_estimate(totals[2])};
}

PopulationState drift_snapshot(const SimConfig& config, long step, double max_self_overlap,
                               std::uint64_t stream_base) {
  constexpr int kMaxAttempts = 32;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    PopulationState state =
        run_to_step(config, step, stream_base + static_cast<std::uint64_t>(attempt) * 7919);
    if (self_overlap(state) <= max_self_overlap) return state;
  }
  throw std::runtime_error("no snapshot below the overlap cap at step " +
                           std::to_string(step));
}

ExcessDriftResult excess_drift(const PopulationState& snapshot, const ChannelSpec& quantized,
                               double alpha, long samples, RandomSource rng, unsigned workers,
                               bool paired) {
  if (!quantized.is_quantized())
    throw std::invalid_argument("excess drift is undefined for the Soft channel");
  if (samples < 1) throw std::invalid_argument("drift estimate needs samples >= 1");
  validate_channel(quantized, snapshot.label_count());

  ChannelSpec soft = quantized;
  soft.kind = ChannelKind::kSoft;

  const int m = *effective_bandwidth(quantized);
  const double predicted =
      injection_u_drift(self_overlap(snapshot), snapshot.population(), m, alpha);

  if (!paired) {
    const EstimateWithError q = one_step_drift(snapshot, quantized, alpha, samples,
                                               rng.split(1), workers);
    const EstimateWithError s = one_step_drift(snapshot, soft, alpha, samples,
                                               rng.split(2), workers);
    const double se = std::sqrt(q.std_error * q.std_error + s.std_error * s.std_error);
    return {{q.value - s.value, se, samples}, predicted};
  }

  const SnapshotView view(snapshot, alpha);
  std::vector<MomentAccumulator> totals(1);
  chunked_samples(
      samples, workers, rng, static_cast<std::size_t>(view.k), totals,
      [&](RandomSource& r, detail::EmitScratch& scratch,
          std::vector<MomentAccumulator>& acc) {
        // One pair draw shared by both channels; only the quantized draw
        // consumes message randomness. The quantized delta is computed
        // before the scratch is reused for the soft message.
        const auto [speaker, listener] = select_pair(view.n, r);
        const auto src = snapshot.agent(speaker).weights();
        const auto q_msg = detail::emit_raw(src, quantized, r, scratch);
        const double du_quantized = delta_u(view, listener, q_msg);
        const auto s_msg = detail::emit_raw(src, soft, r, scratch);
        acc[0].add(du_quantized - delta_u(view, listener, s_msg));
      });
  return {to_estimate(totals[0]), predicted};
}

EstimateWithError early_drift_slope(const Trajectory& trajectory, int window) {
  if (window < 2) throw std::invalid_argument("slope window must be >= 2 probes");
  if (static_cast<long>(trajectory.probes.size()) < window + 1)
    throw std::invalid_argument("trajectory has too few probes for the slope window");
  std::vector<double> x, y;
  x.reserve(static_cast<std::size_t>(window));
  y.reserve(static_cast<std::size_t>(window));
  for (int i = 0; i < window; ++i) {
    x.push_back(static_cast<double>(trajectory.probes[static_cast<std::size_t>(i)].step));
    y.push_back(trajectory.probes[static_cast<std::size_t>(i)].record.polarization);
  }
  const LineFit fit = least_squares(x, y);
  // Standard error of the slope from the residual variance.
  double sxx = 0.0, ssr = 0.0, mx = 0.0;
  for (double v : x) mx += v;
  mx /= static_cast<double>(window);
  for (int i = 0; i < window; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    const double r = y[idx] - (fit.intercept + fit.slope * x[idx]);
    ssr += r * r;
    sxx += (x[idx] - mx) * (x[idx] - mx);
  }
  const double se =
      window > 2 ? std::sqrt(ssr / static_cast<double>(window - 2) / sxx) : 0.0;
  return {fit.slope, se, window};
}

std::optional<long> consensus_time_empirical(const Trajectory& trajectory, double u_star) {
  if (!(u_star > 0.0 && u_star < 1.0))
    throw std::invalid_argument("u_star must lie in (0, 1)");
  for (const auto& probe : trajectory.probes) {
    if (probe.record.polarization >= u_star) return probe.step;
  }
  return std::nullopt;
}

EstimateWithError fixation_estimate(const EnsembleResult& ensemble, Label label) {
  if (label < 0 || label >= ensemble.label_count)
    throw std::invalid_argument("label out of range");
  const long decided = ensemble.decided();
  if (decided == 0) throw std::invalid_argument("fixation estimate needs decided trials");
  const long wins = ensemble.winner_counts()[static_cast<std::size_t>(label)];
  const double p = static_cast<double>(wins) / static_cast<double>(decided);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(decided));
  return {p, se, decided};
}

ScalingFit loglog_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("log-log fit needs >= 2 points");
  std::vector<double> lx, ly;
  std::vector<std::pair<double, double>> logged;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0))
      throw std::domain_error("log-log fit needs strictly positive values");
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
    logged.emplace_back(lx.back(), ly.back());
  }
  const LineFit fit = least_squares(lx, ly);
  return {fit.slope, fit.intercept, fit.r_squared, std::move(logged)};
}

namespace {

double alpha_objective(std::span<const std::pair<int, const Trajectory*>> trajectories,
                       int label_count, int bandwidth, double alpha) {
  CompensatedSum sse;
  for (const auto& [n, traj] : trajectories) {
    for (const auto& probe : traj->probes) {
      const double pred = meanfield_u(static_cast<double>(probe.step), n, label_count,
                                      bandwidth, alpha);
      const double r = probe.record.polarization - pred;
      sse.add(r * r);
    }
  }
  return sse.value();
}

}  // namespace

AlphaFit effective_alpha_fit(std::span<const std::pair<int, const Trajectory*>> trajectories,
                             int label_count, int bandwidth) {
  if (trajectories.empty()) throw std::invalid_argument("alpha fit needs trajectories");
  for (const auto& [n, traj] : trajectories) {
    if (traj == nullptr || traj->probes.empty())
      throw std::invalid_argument("alpha fit needs probed trajectories");
    if (n < 2) throw std::invalid_argument("alpha fit: population must be >= 2");
  }
  auto obj = [&](double a) {
    return alpha_objective(trajectories, label_count, bandwidth, a);
  };

  constexpr double kAlphaMin = 1e-4;
  constexpr int kCoarse = 33;
  double best_alpha = kAlphaMin;
  double best_value = obj(kAlphaMin);
  int best_index = 0;
  std::vector<double> grid(kCoarse);
  for (int i = 0; i < kCoarse; ++i) {
    grid[static_cast<std::size_t>(i)] =
        kAlphaMin + (1.0 - kAlphaMin) * i / static_cast<double>(kCoarse - 1);
    const double v = obj(grid[static_cast<std::size_t>(i)]);
    if (v < best_value) {
      best_value = v;
      best_alpha = grid[static_cast<std::size_t>(i)];
      best_index = i;
    }
  }

  const bool bracketed = best_index > 0 && best_index < kCoarse - 1;
  double lo, hi;
  if (bracketed) {
    lo = grid[static_cast<std::size_t>(best_index - 1)];
    hi = grid[static_cast<std::size_t>(best_index + 1)];
  } else {
    // Bracketing failed at the coarse scale; fall back to a dense scan.
    constexpr int kDense = 1000;
    for (int i = 0; i < kDense; ++i) {
      const double a = kAlphaMin + (1.0 - kAlphaMin) * i / static_cast<double>(kDense - 1);
      const double v = obj(a);
      if (v < best_value) {
        best_value = v;
        best_alpha = a;
      }
    }
    const double span = (1.0 - kAlphaMin) / (kDense - 1);
    lo = std::max(kAlphaMin, best_alpha - span);
    hi = std::min(1.0, best_alpha + span);
  }

  // Golden-section refinement.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = obj(c), fd = obj(d);
  for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = obj(d);
    }
  }
  const double refined = 0.5 * (a + b);
  const double refined_value = obj(refined);
  if (refined_value < best_value) {
    best_value = refined_value;
    best_alpha = refined;
  }
  return {best_alpha, best_value};
}

}  // namespace qsg
