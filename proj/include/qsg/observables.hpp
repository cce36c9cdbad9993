// Macroscopic order parameters of a population state and the algebraic
// identities connecting them: population mean, polarization U = |mean|^2,
// disagreement energy V, mean self-overlap q, coordination rate S, and the
// entropy / magnetization summaries of the mean.

#pragma once

#include <utility>

#include "qsg/population.hpp"

namespace qsg {

// Stabilizer added inside the entropy logarithm.
inline constexpr double kEntropyEpsilon = 1e-12;

struct ObservableRecord {
  SimplexVector mean;
  double polarization;    // U in [1/K, 1]
  double disagreement;    // V >= 0; NaN for probe-estimated records
  double self_overlap;    // q in [1/K, 1]; NaN for probe-estimated records
  double coordination;    // S in [0, 1]; NaN for probe-estimated records
  double entropy;         // H in [0, 1], normalized by log K
  double magnetization;   // M in [0, 1]
  double p_max;           // max coordinate of the mean

  // Exact record from full internal states.
  static ObservableRecord from_state(const PopulationState& state);
  // Mean-only record (e.g. from measurement probes); V, q, S are NaN.
  static ObservableRecord from_mean(SimplexVector mean);
};

SimplexVector mean(const PopulationState& state);
double polarization(const PopulationState& state);
double disagreement(const PopulationState& state);
double self_overlap(const PopulationState& state);
// Average pairwise inner product over ordered distinct pairs, computed via
// S = U - V / (N (N - 1)).
double coordination(const PopulationState& state);

// (H, M) of a mean vector: normalized entropy with the epsilon stabilizer,
// clamped to [0, 1], and magnetization (K p_max - 1) / (K - 1).
std::pair<double, double> entropy_magnetization(const SimplexVector& mean);

// One-vs-rest closure: reconstructs (p_max, M, H) from U alone by assuming
// the mean puts p on one label and spreads the rest evenly.
struct OneVsRest {
  double p_max;
  double magnetization;
  double entropy;
};
OneVsRest one_vs_rest_maps(double polarization, int label_count);

}  // namespace qsg
