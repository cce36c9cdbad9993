// Closed-form predictions for the gossip dynamics: expected one-step drifts
// of the order parameters, the homogeneous mean-field polarization curve and
// its hitting time, the bias/temperature crossover parameters, and the
// diffusion fixation law. Time is measured in interaction steps unless a
// function says rounds (one round = N steps).

#pragma once

#include <limits>

namespace qsg {

struct DriftPrediction {
  double soft_term;       // heterogeneity contribution to E[dU]
  double injection_term;  // quantization contribution to E[dU]
  double total;
};

struct CrossoverParams {
  double gamma_h;  // bias strength relative to sampling drift, m N h / alpha
  double gamma_t;  // tempering strength, (m N / alpha) |1/T - 1|
  double n_c;      // crossover population size alpha / (m |h|); +inf at h = 0
};

// E[dU] per step under Soft exchange: 2 a^2 V / (N^2 (N-1)).
double soft_u_drift(double disagreement, int population, double alpha);

// Quantization excess E[dU] per step: (a^2 / (m N^2)) (1 - q).
double injection_u_drift(double self_overlap, int population, int bandwidth, double alpha);

// Both contributions at a state with moments (U, V); requires the implied
// q = U + V/N to lie in [1/K, 1].
DriftPrediction total_u_drift(double polarization, double disagreement, int population,
                              int label_count, int bandwidth, double alpha);

// E[dV] per step under Soft exchange: -(2a/(N-1)) (1 - a + a/N) V; always <= 0.
double soft_v_contraction(double disagreement, int population, double alpha);

// E[dV] per step under Top-m: Soft contraction plus the injection term
// (a^2 (N-1) / (m N)) (1 - U - V/N).
double topm_v_drift(double polarization, double disagreement, int population, int bandwidth,
                    double alpha);

// E[dS] per step: 2 a V / (N (N-1)^2); nonnegative and bandwidth-free.
double s_drift(double disagreement, int population, double alpha);

// Mean-field polarization from the symmetric start, in interaction steps:
// U(t) = 1 - (1 - 1/K) exp(-a^2 t / (m N^2)).
double meanfield_u(double steps, int population, int label_count, int bandwidth, double alpha);
// Same curve parameterized by rounds tau = t / N.
double meanfield_u_rounds(double rounds, int population, int label_count, int bandwidth,
                          double alpha);

// Mean-field hitting time of threshold u_star in (1/K, 1), in steps:
// (m N^2 / a^2) ln((1 - 1/K) / (1 - u_star)).
double consensus_time(double u_star, int label_count, int population, int bandwidth,
                      double alpha);
double consensus_time_rounds(double u_star, int label_count, int population, int bandwidth,
                             double alpha);

// Dimensionless crossover parameters for a bias field h and temperature T.
CrossoverParams crossover(int population, int bandwidth, double alpha, double h,
                          double temperature);

// Fixation probability of the first label for the diffusion surrogate:
// pi(p0) = (1 - exp(-2 G p0)) / (1 - exp(-2 G)); continuous limit pi = p0
// as G -> 0. At p0 = 1/2 this is the logistic 1 / (1 + exp(-G)).
double fixation_probability(double p0, double gamma_h);

// E[M_inf] from the half-half start: 2 pi(1/2) - 1 by definition.
double expected_final_magnetization(double gamma_h);

// Linearized deterministic rate of tempering near symmetry, per round:
// a (1/T - 1); positive (amplifying) for T < 1, negative for T > 1.
double tempered_linear_rate(double alpha, double temperature);

inline constexpr double kInfiniteScale = std::numeric_limits<double>::infinity();

}  // namespace qsg
