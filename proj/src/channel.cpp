#include "qsg/channel.hpp"

#include <algorithm>

namespace qsg {

std::optional<int> effective_bandwidth(const ChannelSpec& spec) {
  switch (spec.kind) {
    case ChannelKind::kSoft:
      return std::nullopt;
    case ChannelKind::kHard:
      return 1;
    case ChannelKind::kTopM:
      return spec.bandwidth;
  }
  return std::nullopt;
}

void validate_channel(const ChannelSpec& spec, int label_count) {
  if (spec.kind == ChannelKind::kTopM && spec.bandwidth < 1)
    throw std::invalid_argument("top-m channel needs bandwidth >= 1");
  if (spec.temperature && !(*spec.temperature > 0.0))
    throw std::domain_error("channel temperature must be > 0");
  if (spec.bias_h && label_count != 2)
    throw std::invalid_argument("bias field is only defined for two-label populations");
}

SimplexVector emit_message(const SimplexVector& source, const ChannelSpec& spec,
                           RandomSource& rng) {
  validate_channel(spec, source.label_count());
  detail::EmitScratch scratch;
  scratch.resize(source.weights().size());
  auto msg = detail::emit_raw(source.weights(), spec, rng, scratch);
  return SimplexVector(std::vector<double>(msg.begin(), msg.end()));
}

namespace detail {

std::span<const double> emit_raw(std::span<const double> source, const ChannelSpec& spec,
                                 RandomSource& rng, EmitScratch& scratch) {
  std::span<const double> dist = source;
  if (spec.bias_h && *spec.bias_h != 0.0) {
    tilt2_raw(dist, *spec.bias_h, scratch.modified);
    dist = scratch.modified;
  }
  if (spec.temperature && *spec.temperature != 1.0) {
    temper_raw(dist, *spec.temperature, scratch.modified);
    dist = scratch.modified;
  }
  switch (spec.kind) {
    case ChannelKind::kSoft:
      if (dist.data() != scratch.message.data())
        std::copy(dist.begin(), dist.end(), scratch.message.begin());
      break;
    case ChannelKind::kHard:
      empirical_raw(dist, 1, rng, scratch.message);
      break;
    case ChannelKind::kTopM:
      empirical_raw(dist, spec.bandwidth, rng, scratch.message);
      break;
  }
  return scratch.message;
}

}  // namespace detail

}  // namespace qsg
