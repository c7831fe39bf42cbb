#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace eincoh {

// mpq_class keeps itself canonical after arithmetic; only raw construction
// from (p, q) needs an explicit canonicalize().
using Rational = mpq_class;
using Integer = mpz_class;

Rational make_q(long p, long q = 1);
Rational make_q(const Integer& p, const Integer& q);

// "p/q" or "p"; no whitespace, no decimals.
Rational parse_rational(const std::string& s);

// Accepts "p/q" or a finite decimal such as "0.125" or "-1.5e-2", converted
// exactly.  Returns true in `was_decimal` when the decimal path was taken.
Rational parse_rational_or_decimal(const std::string& s, bool* was_decimal = nullptr);

// "p/q", q omitted when 1.
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

int sign(const Rational& q);

struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace eincoh
