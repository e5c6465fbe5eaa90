#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "pcfgscm/rational.hpp"

namespace pcfgscm {

class NoiseExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source of Uniform[0,1) values consumed one per expansion site (leftmost
/// order) and then one per label mechanism.
///
/// Either replays a fixed list of exact rationals or draws 53-bit dyadic
/// values from a seeded mt19937_64. Seeded draws are converted to rationals
/// exactly, so threshold comparisons are never subject to rounding.
class NoiseStream {
 public:
  explicit NoiseStream(std::vector<Rational> values);

  static NoiseStream seeded(std::uint64_t seed);

  Rational next();

  std::size_t consumed() const { return consumed_; }

 private:
  struct Replay {
    std::vector<Rational> values;
  };

  explicit NoiseStream(std::mt19937_64 engine) : source_(std::move(engine)) {}

  std::variant<Replay, std::mt19937_64> source_;
  std::size_t consumed_ = 0;
};

/// Inverse-CDF selection with half-open intervals: returns the first index i
/// with cumulative(i-1) <= u < cumulative(i). `probs` must sum to 1.
std::size_t select_by_threshold(const std::vector<Rational>& probs, const Rational& u);

}  // namespace pcfgscm
