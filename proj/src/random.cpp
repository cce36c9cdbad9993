#include "qsg/random.hpp"

#include <cmath>
#include <stdexcept>

namespace qsg {

double RandomSource::next_normal() {
  double u1 = next_unit();
  double u2 = next_unit();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double RandomSource::next_gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma shape must be > 0");
  if (shape < 1.0) {
    // Boost to shape + 1, then scale back by U^(1/shape).
    double u = next_unit();
    while (u <= 0.0) u = next_unit();
    return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = next_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = next_unit();
    while (u <= 0.0) u = next_unit();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace qsg
