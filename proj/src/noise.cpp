#include "pcfgscm/noise.hpp"

#include <string>

namespace pcfgscm {

NoiseStream::NoiseStream(std::vector<Rational> values) : source_(Replay{std::move(values)}) {
  for (const auto& v : std::get<Replay>(source_).values) {
    if (v < 0 || v >= 1) throw std::invalid_argument("noise value outside [0,1): " + to_string(v));
  }
}

NoiseStream NoiseStream::seeded(std::uint64_t seed) { return NoiseStream(std::mt19937_64(seed)); }

Rational NoiseStream::next() {
  if (auto* replay = std::get_if<Replay>(&source_)) {
    if (consumed_ >= replay->values.size()) {
      throw NoiseExhausted("noise stream exhausted after " + std::to_string(consumed_) + " values");
    }
    return replay->values[consumed_++];
  }
  auto& engine = std::get<std::mt19937_64>(source_);
  ++consumed_;
  // Top 53 bits, scaled by 2^-53: exactly representable and in [0,1).
  static const mpz_class kScale = mpz_class(1) << 53;
  Rational u(mpz_class(static_cast<unsigned long>(engine() >> 11)), kScale);
  u.canonicalize();
  return u;
}

std::size_t select_by_threshold(const std::vector<Rational>& probs, const Rational& u) {
  Rational cumulative = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  throw std::invalid_argument("noise value " + to_string(u) + " beyond cumulative mass " + to_string(cumulative));
}

}  // namespace pcfgscm
