#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace pcfgscm {

/// Exact probability value. All model probabilities are carried as rationals;
/// doubles only appear in diagnostics (MI, p-values).
using Rational = mpq_class;

/// Parses `p`, `-p` or `p/q` (q > 0). Decimal and exponent forms are rejected
/// so model parameters stay exact. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical `p/q` rendering; integers still carry the `/1` denominator.
std::string to_string(const Rational& r);

/// Rendering without the `/1` suffix for integers, used in human reports.
std::string to_short_string(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace pcfgscm
