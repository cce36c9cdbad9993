// Points on the probability simplex and the microscopic interaction rules:
// categorical sampling, empirical messages, tempering, bias tilt, and the
// listener's convex adaptation step.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsg/random.hpp"

namespace qsg {

using Label = std::int32_t;

// Tolerances of the simplex contract. Convex updates are exact up to
// rounding, so anything outside these bands is treated as a bug, not noise.
inline constexpr double kWeightClampFloor = -1e-12;
inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kVertexTolerance = 1e-12;

class SimplexVector {
 public:
  // Validates and normalizes: negatives in [-1e-12, 0) are clamped to zero,
  // anything lower throws; the sum must be within 1e-9 of one.
  explicit SimplexVector(std::vector<double> weights);

  int label_count() const { return static_cast<int>(w_.size()); }
  double operator[](int k) const { return w_[static_cast<std::size_t>(k)]; }
  std::span<const double> weights() const { return w_; }

  double squared_norm() const;

  // Index of the largest weight, lowest index on ties.
  Label argmax() const;

  // True when this point is a vertex: one weight within tol of 1, rest of 0.
  bool is_vertex(double tol = kVertexTolerance) const;

  // In-place convex step toward `target` with rate alpha, then renormalize.
  // The caller guarantees alpha in (0,1] and matching dimension.
  void mix_toward(std::span<const double> target, double alpha);

  bool operator==(const SimplexVector&) const = default;

 private:
  friend SimplexVector uniform_vector(int);
  friend SimplexVector vertex(int, Label);
  struct Unchecked {};
  SimplexVector(Unchecked, std::vector<double> w) : w_(std::move(w)) {}

  std::vector<double> w_;
};

// The symmetric point 1/K.
SimplexVector uniform_vector(int label_count);

// The one-hot basis point e_k.
SimplexVector vertex(int label_count, Label k);

// One categorical draw from x; inverse CDF over the stored order, exactly
// one rng event per call.
Label sample_label(const SimplexVector& x, RandomSource& rng);

// Empirical distribution of `bandwidth` i.i.d. categorical draws from x.
// Every weight of the result is an integer multiple of 1/bandwidth.
SimplexVector empirical_message(const SimplexVector& x, int bandwidth, RandomSource& rng);

// Temperature transform: weights proportional to x_k^(1/T), computed in log
// space. Zero weights stay zero for every T (boundary convention); T=1 is an
// exact identity. T <= 0 throws; the T->0 argmax limit is not applied.
SimplexVector temper(const SimplexVector& x, double temperature);

// Two-label bias field: p -> p e^h / (p e^h + 1 - p). Fixes p = 0 and p = 1.
double bias_tilt(double p, double h);

// Listener adaptation: (1 - alpha) x_l + alpha y. Requires alpha in (0,1]
// and matching dimensions.
SimplexVector listener_update(const SimplexVector& x_l, const SimplexVector& y, double alpha);

namespace detail {

// Raw-span variants used by hot loops; callers pass pre-validated data.
Label sample_raw(std::span<const double> weights, RandomSource& rng);
void empirical_raw(std::span<const double> weights, int bandwidth, RandomSource& rng,
                   std::span<double> out);
void temper_raw(std::span<const double> weights, double temperature, std::span<double> out);
void tilt2_raw(std::span<const double> weights, double h, std::span<double> out);

}  // namespace detail

}  // namespace qsg
