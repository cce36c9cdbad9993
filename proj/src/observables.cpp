#include "qsg/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsg {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

SimplexVector mean(const PopulationState& state) {
  const int k_count = state.label_count();
  const int n = state.population();
  std::vector<double> m(static_cast<std::size_t>(k_count), 0.0);
  for (int i = 0; i < n; ++i) {
    auto w = state.agent(i).weights();
    for (int k = 0; k < k_count; ++k) m[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(k)];
  }
  for (double& v : m) v /= static_cast<double>(n);
  return SimplexVector(std::move(m));
}

double polarization(const PopulationState& state) { return mean(state).squared_norm(); }

double disagreement(const PopulationState& state) {
  const SimplexVector m = mean(state);
  double v = 0.0;
  for (int i = 0; i < state.population(); ++i) {
    auto w = state.agent(i).weights();
    for (int k = 0; k < state.label_count(); ++k) {
      const double d = w[static_cast<std::size_t>(k)] - m[k];
      v += d * d;
    }
  }
  return v;
}

double self_overlap(const PopulationState& state) {
  double q = 0.0;
  for (int i = 0; i < state.population(); ++i) q += state.agent(i).squared_norm();
  return q / static_cast<double>(state.population());
}

double coordination(const PopulationState& state) {
  const int n = state.population();
  if (n < 2) throw std::invalid_argument("coordination needs at least 2 agents");
  const double u = polarization(state);
  const double v = disagreement(state);
  return u - v / (static_cast<double>(n) * static_cast<double>(n - 1));
}

std::pair<double, double> entropy_magnetization(const SimplexVector& m) {
  const int k_count = m.label_count();
  double h = 0.0;
  double p_max = 0.0;
  for (int k = 0; k < k_count; ++k) {
    h -= m[k] * std::log(m[k] + kEntropyEpsilon);
    p_max = std::max(p_max, m[k]);
  }
  h /= std::log(static_cast<double>(k_count));
  h = std::clamp(h, 0.0, 1.0);
  const double mag = (k_count * p_max - 1.0) / static_cast<double>(k_count - 1);
  return {h, mag};
}

OneVsRest one_vs_rest_maps(double polarization, int label_count) {
  const double k = static_cast<double>(label_count);
  const double lo = 1.0 / k;
  if (polarization < lo - 1e-9 || polarization > 1.0 + 1e-9)
    throw std::domain_error("polarization outside [1/K, 1]");
  const double ku1 = std::max(0.0, k * std::min(polarization, 1.0) - 1.0);
  const double p = (1.0 + std::sqrt((k - 1.0) * ku1)) / k;
  const double mag = std::sqrt(ku1 / (k - 1.0));
  double h = 0.0;
  if (p < 1.0) {
    h = -(p * std::log(p) + (1.0 - p) * std::log((1.0 - p) / (k - 1.0))) / std::log(k);
  }
  return {p, mag, h};
}

ObservableRecord ObservableRecord::from_state(const PopulationState& state) {
  const int n = state.population();
  SimplexVector m = qsg::mean(state);
  const double u = m.squared_norm();
  const double q = qsg::self_overlap(state);
  const double v = qsg::disagreement(state);
  const double s = u - v / (static_cast<double>(n) * static_cast<double>(n - 1));
  auto [h, mag] = entropy_magnetization(m);
  double p_max = 0.0;
  for (int k = 0; k < m.label_count(); ++k) p_max = std::max(p_max, m[k]);
  return ObservableRecord{std::move(m), u, v, q, s, h, mag, p_max};
}

ObservableRecord ObservableRecord::from_mean(SimplexVector mean_vec) {
  const double u = mean_vec.squared_norm();
  auto [h, mag] = entropy_magnetization(mean_vec);
  double p_max = 0.0;
  for (int k = 0; k < mean_vec.label_count(); ++k) p_max = std::max(p_max, mean_vec[k]);
  return ObservableRecord{std::move(mean_vec), u, kNaN, kNaN, kNaN, h, mag, p_max};
}

}  // namespace qsg
