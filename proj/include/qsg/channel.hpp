// Message channels. A speaker with belief x emits either the full
// distribution (Soft), one sampled label (Hard), or the empirical
// distribution of m samples (Top-m). Optional modifiers reshape the
// speaker's sampling law before emission: a two-label bias field h, then a
// temperature transform. All three regimes share the same conditional mean
// of the (modified) source distribution.

#pragma once

#include <optional>
#include <vector>

#include "qsg/simplex.hpp"

namespace qsg {

enum class ChannelKind { kSoft, kHard, kTopM };

struct ChannelSpec {
  ChannelKind kind = ChannelKind::kHard;
  int bandwidth = 1;                    // Top-m sample count; ignored otherwise
  std::optional<double> temperature;    // absent = 1 (identity)
  std::optional<double> bias_h;         // two-label populations only

  static ChannelSpec soft() { return {ChannelKind::kSoft, 1, {}, {}}; }
  static ChannelSpec hard() { return {ChannelKind::kHard, 1, {}, {}}; }
  static ChannelSpec top_m(int m) { return {ChannelKind::kTopM, m, {}, {}}; }

  ChannelSpec with_temperature(double t) const {
    ChannelSpec s = *this;
    s.temperature = t;
    return s;
  }
  ChannelSpec with_bias(double h) const {
    ChannelSpec s = *this;
    s.bias_h = h;
    return s;
  }

  bool is_quantized() const { return kind != ChannelKind::kSoft; }
};

// Samples per message: Hard -> 1, Top-m -> m, Soft -> nullopt (unbounded).
std::optional<int> effective_bandwidth(const ChannelSpec& spec);

// Throws if the spec is malformed or incompatible with the label count
// (bias on K != 2, non-positive temperature or bandwidth).
void validate_channel(const ChannelSpec& spec, int label_count);

// Emit one message from source belief x. Bias tilt is applied first, then
// tempering; Soft transmits the modified distribution deterministically,
// Hard/Top-m sample from it.
SimplexVector emit_message(const SimplexVector& source, const ChannelSpec& spec,
                           RandomSource& rng);

namespace detail {

// Scratch for allocation-free emission in simulation loops.
struct EmitScratch {
  std::vector<double> modified;
  std::vector<double> message;
  void resize(std::size_t k) {
    modified.resize(k);
    message.resize(k);
  }
};

// Writes the message into scratch.message and returns a span of it.
// The spec must have been validated against the source dimension.
std::span<const double> emit_raw(std::span<const double> source, const ChannelSpec& spec,
                                 RandomSource& rng, EmitScratch& scratch);

}  // namespace detail

}  // namespace qsg
