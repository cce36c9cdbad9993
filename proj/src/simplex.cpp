#include "qsg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qsg {

SimplexVector::SimplexVector(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.size() < 2) throw std::invalid_argument("simplex vector needs at least 2 labels");
  double sum = 0.0;
  for (double& v : w_) {
    if (v < 0.0) {
      if (v < kWeightClampFloor)
        throw std::domain_error("simplex weight below clamp floor: " + std::to_string(v));
      v = 0.0;
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::domain_error("simplex weights must sum to 1, got " + std::to_string(sum));
  for (double& v : w_) v /= sum;
}

double SimplexVector::squared_norm() const {
  double s = 0.0;
  for (double v : w_) s += v * v;
  return s;
}

Label SimplexVector::argmax() const {
  return static_cast<Label>(std::max_element(w_.begin(), w_.end()) - w_.begin());
}

bool SimplexVector::is_vertex(double tol) const {
  for (double v : w_) {
    if (v > tol && v < 1.0 - tol) return false;
  }
  return true;
}

void SimplexVector::mix_toward(std::span<const double> target, double alpha) {
  double sum = 0.0;
  for (std::size_t k = 0; k < w_.size(); ++k) {
    w_[k] = (1.0 - alpha) * w_[k] + alpha * target[k];
    sum += w_[k];
  }
  for (double& v : w_) v /= sum;
}

SimplexVector uniform_vector(int label_count) {
  if (label_count < 2) throw std::invalid_argument("label count must be >= 2");
  std::vector<double> w(static_cast<std::size_t>(label_count),
                        1.0 / static_cast<double>(label_count));
  return SimplexVector(SimplexVector::Unchecked{}, std::move(w));
}

SimplexVector vertex(int label_count, Label k) {
  if (label_count < 2) throw std::invalid_argument("label count must be >= 2");
  if (k < 0 || k >= label_count) throw std::out_of_range("vertex label out of range");
  std::vector<double> w(static_cast<std::size_t>(label_count), 0.0);
  w[static_cast<std::size_t>(k)] = 1.0;
  return SimplexVector(SimplexVector::Unchecked{}, std::move(w));
}

Label sample_label(const SimplexVector& x, RandomSource& rng) {
  return detail::sample_raw(x.weights(), rng);
}

SimplexVector empirical_message(const SimplexVector& x, int bandwidth, RandomSource& rng) {
  if (bandwidth < 1) throw std::invalid_argument("message bandwidth must be >= 1");
  std::vector<double> out(x.weights().size());
  detail::empirical_raw(x.weights(), bandwidth, rng, out);
  return SimplexVector(std::move(out));
}

SimplexVector temper(const SimplexVector& x, double temperature) {
  if (!(temperature > 0.0)) throw std::domain_error("temperature must be > 0");
  if (temperature == 1.0) return x;
  std::vector<double> out(x.weights().size());
  detail::temper_raw(x.weights(), temperature, out);
  return SimplexVector(std::move(out));
}

double bias_tilt(double p, double h) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must be in [0, 1]");
  if (h == 0.0 || p == 0.0 || p == 1.0) return p;
  const double pe = p * std::exp(h);
  return pe / (pe + (1.0 - p));
}

SimplexVector listener_update(const SimplexVector& x_l, const SimplexVector& y, double alpha) {
  if (x_l.label_count() != y.label_count())
    throw std::invalid_argument("listener update: dimension mismatch");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("adaptation rate must be in (0, 1]");
  SimplexVector out = x_l;
  out.mix_toward(y.weights(), alpha);
  return out;
}

namespace detail {

Label sample_raw(std::span<const double> weights, RandomSource& rng) {
  const double u = rng.next_unit();
  double cum = 0.0;
  Label last_positive = 0;
  const int k_count = static_cast<int>(weights.size());
  for (int k = 0; k < k_count; ++k) {
    const double w = weights[static_cast<std::size_t>(k)];
    if (w > 0.0) last_positive = static_cast<Label>(k);
    cum += w;
    if (u < cum) return static_cast<Label>(k);
  }
  // Rounding left cum marginally below 1; return the last admissible label.
  return last_positive;
}

void empirical_raw(std::span<const double> weights, int bandwidth, RandomSource& rng,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const double unit = 1.0 / static_cast<double>(bandwidth);
  for (int j = 0; j < bandwidth; ++j) {
    out[static_cast<std::size_t>(sample_raw(weights, rng))] += unit;
  }
}

void temper_raw(std::span<const double> weights, double temperature, std::span<double> out) {
  if (temperature == 1.0) {
    std::copy(weights.begin(), weights.end(), out.begin());
    return;
  }
  const double inv_t = 1.0 / temperature;
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) {
      out[k] = inv_t * std::log(weights[k]);
      max_log = std::max(max_log, out[k]);
    } else {
      out[k] = -std::numeric_limits<double>::infinity();
    }
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out[k] = std::isinf(out[k]) ? 0.0 : std::exp(out[k] - max_log);
    sum += out[k];
  }
  for (std::size_t k = 0; k < weights.size(); ++k) out[k] /= sum;
}

void tilt2_raw(std::span<const double> weights, double h, std::span<double> out) {
  const double p = bias_tilt(weights[0], h);
  out[0] = p;
  out[1] = 1.0 - p;
}

}  // namespace detail

}  // namespace qsg
