#include "qsg/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace qsg {

namespace {

void check_population(int n) {
  if (n < 2) throw std::invalid_argument("population must be >= 2");
}

void check_bandwidth(int m) {
  if (m < 1) throw std::invalid_argument("bandwidth must be >= 1");
}

void check_alpha(double a) {
  if (!(a > 0.0 && a <= 1.0)) throw std::domain_error("adaptation rate must be in (0, 1]");
}

}  // namespace

double soft_u_drift(double disagreement, int population, double alpha) {
  check_population(population);
  if (disagreement < 0.0) throw std::domain_error("disagreement must be >= 0");
  const double n = population;
  return 2.0 * alpha * alpha * disagreement / (n * n * (n - 1.0));
}

double injection_u_drift(double self_overlap, int population, int bandwidth, double alpha) {
  check_population(population);
  check_bandwidth(bandwidth);
  const double n = population;
  return alpha * alpha / (bandwidth * n * n) * (1.0 - self_overlap);
}

DriftPrediction total_u_drift(double polarization, double disagreement, int population,
                              int label_count, int bandwidth, double alpha) {
  check_population(population);
  check_bandwidth(bandwidth);
  const double n = population;
  const double q = polarization + disagreement / n;
  if (q < 1.0 / label_count - 1e-9 || q > 1.0 + 1e-9)
    throw std::domain_error("inconsistent moments: q = U + V/N outside [1/K, 1]");
  const double soft = soft_u_drift(disagreement, population, alpha);
  const double injection =
      alpha * alpha / (bandwidth * n * n) * (1.0 - polarization - disagreement / n);
  return {soft, injection, soft + injection};
}

double soft_v_contraction(double disagreement, int population, double alpha) {
  check_population(population);
  if (disagreement < 0.0) throw std::domain_error("disagreement must be >= 0");
  const double n = population;
  return -(2.0 * alpha / (n - 1.0)) * (1.0 - alpha + alpha / n) * disagreement;
}

double topm_v_drift(double polarization, double disagreement, int population, int bandwidth,
                    double alpha) {
  check_population(population);
  check_bandwidth(bandwidth);
  const double n = population;
  return soft_v_contraction(disagreement, population, alpha) +
         alpha * alpha * (n - 1.0) / (bandwidth * n) *
             (1.0 - polarization - disagreement / n);
}

double s_drift(double disagreement, int population, double alpha) {
  check_population(population);
  if (disagreement < 0.0) throw std::domain_error("disagreement must be >= 0");
  const double n = population;
  return 2.0 * alpha * disagreement / (n * (n - 1.0) * (n - 1.0));
}

double meanfield_u(double steps, int population, int label_count, int bandwidth, double alpha) {
  check_population(population);
  check_bandwidth(bandwidth);
  const double n = population;
  return 1.0 - (1.0 - 1.0 / label_count) *
                   std::exp(-alpha * alpha * steps / (bandwidth * n * n));
}

double meanfield_u_rounds(double rounds, int population, int label_count, int bandwidth,
                          double alpha) {
  return meanfield_u(rounds * population, population, label_count, bandwidth, alpha);
}

double consensus_time(double u_star, int label_count, int population, int bandwidth,
                      double alpha) {
  check_population(population);
  check_bandwidth(bandwidth);
  const double lo = 1.0 / label_count;
  if (!(u_star > lo && u_star < 1.0))
    throw std::domain_error("consensus threshold must lie in (1/K, 1)");
  const double n = population;
  return bandwidth * n * n / (alpha * alpha) * std::log((1.0 - lo) / (1.0 - u_star));
}

double consensus_time_rounds(double u_star, int label_count, int population, int bandwidth,
                             double alpha) {
  return consensus_time(u_star, label_count, population, bandwidth, alpha) / population;
}

CrossoverParams crossover(int population, int bandwidth, double alpha, double h,
                          double temperature) {
  check_population(population);
  check_bandwidth(bandwidth);
  check_alpha(alpha);
  if (!(temperature > 0.0)) throw std::domain_error("temperature must be > 0");
  const double scale = bandwidth * static_cast<double>(population) / alpha;
  const double gamma_h = scale * h;
  const double gamma_t = scale * std::abs(1.0 / temperature - 1.0);
  const double n_c = h == 0.0 ? kInfiniteScale : alpha / (bandwidth * std::abs(h));
  return {gamma_h, gamma_t, n_c};
}

double fixation_probability(double p0, double gamma_h) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::domain_error("p0 must be in [0, 1]");
  if (std::abs(gamma_h) < 1e-8) return p0;  // neutral martingale limit
  const double a = -2.0 * gamma_h;
  if (a > 700.0) {
    // Rescale by exp(-a) to avoid overflow for strongly negative bias.
    const double num = std::exp(-a) - std::exp(a * (p0 - 1.0));
    const double den = std::exp(-a) - 1.0;
    return num / den;
  }
  return std::expm1(a * p0) / std::expm1(a);
}

double expected_final_magnetization(double gamma_h) {
  return 2.0 * fixation_probability(0.5, gamma_h) - 1.0;
}

double tempered_linear_rate(double alpha, double temperature) {
  check_alpha(alpha);
  if (!(temperature > 0.0)) throw std::domain_error("temperature must be > 0");
  return alpha * (1.0 / temperature - 1.0);
}

}  // namespace qsg
