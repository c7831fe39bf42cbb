#pragma once

#include "eincoh/rational.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace eincoh {

// Dense univariate polynomial in k, ascending coefficients, never carries a
// zero leading coefficient.
class PolyQ {
public:
    PolyQ() = default;
    PolyQ(std::initializer_list<Rational> ascending);
    explicit PolyQ(std::vector<Rational> ascending);
    PolyQ(const Rational& c);  // NOLINT: constants promote implicitly
    PolyQ(long c) : PolyQ(Rational(c)) {}  // NOLINT

    static PolyQ k();  // the indeterminate
    static PolyQ from_descending(const std::vector<Rational>& desc);

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(int i) const;
    const Rational& lead() const { return c_.back(); }

    Rational eval(const Rational& x) const;
    double eval(double x) const;

    PolyQ derivative() const;
    PolyQ operator-() const;
    PolyQ& operator+=(const PolyQ& o);
    PolyQ& operator-=(const PolyQ& o);
    PolyQ& operator*=(const PolyQ& o);

    // Euclidean division over Q; throws on division by zero polynomial.
    void divmod(const PolyQ& d, PolyQ& q, PolyQ& r) const;
    PolyQ monic() const;

    bool operator==(const PolyQ& o) const { return c_ == o.c_; }
    bool operator!=(const PolyQ& o) const { return !(*this == o); }

    std::string to_string(const char* var = "k") const;

private:
    void trim();
    std::vector<Rational> c_;
};

PolyQ operator+(PolyQ a, const PolyQ& b);
PolyQ operator-(PolyQ a, const PolyQ& b);
PolyQ operator*(PolyQ a, const PolyQ& b);
PolyQ pow(const PolyQ& p, unsigned e);
PolyQ poly_gcd(PolyQ a, PolyQ b);  // monic, or zero
PolyQ exact_quotient(const PolyQ& a, const PolyQ& b);  // throws if remainder != 0
PolyQ squarefree_part(const PolyQ& p);

inline Rational poly_eval(const PolyQ& p, const Rational& x) { return p.eval(x); }

// Signed remainder sequence p, p', -rem(...), ...
std::vector<PolyQ> sturm_sequence(const PolyQ& p);
int sign_variations(const std::vector<PolyQ>& seq, const Rational& x);

// Distinct real roots of p strictly inside (lo, hi).
int count_roots_open(const PolyQ& p, const Rational& lo, const Rational& hi);

struct Interval {
    Rational lo, hi;  // lo == hi means the root is exactly lo
};

enum class SignTag { StrictlyPositive, StrictlyNegative, Mixed, ZeroPolynomial };

struct SignResult {
    SignTag tag;
    std::vector<Interval> roots;  // isolating intervals, only for Mixed
};

struct EndFlags {
    bool open_lo = true;
    bool open_hi = true;
};

inline constexpr EndFlags kOpen{true, true};
inline constexpr EndFlags kClosed{false, false};

// Mixed means p has a real root in the interval (with the given end
// handling), whether or not p changes sign there.
SignResult sign_on_interval(const PolyQ& p, const Rational& lo, const Rational& hi,
                            EndFlags ends = kOpen);

const char* to_string(SignTag t);

// a + b*sqrt(m), m square-free (or 0 with b == 0).
class QuadraticSurd {
public:
    QuadraticSurd() = default;
    QuadraticSurd(const Rational& a);  // NOLINT
    QuadraticSurd(const Rational& a, const Rational& b, const Integer& radicand);

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    const Integer& m() const { return m_; }
    bool is_rational() const { return m_ == 0; }

    double to_double() const;

    QuadraticSurd operator-() const;
    friend QuadraticSurd operator+(const QuadraticSurd& x, const QuadraticSurd& y);
    friend QuadraticSurd operator-(const QuadraticSurd& x, const QuadraticSurd& y);
    friend QuadraticSurd operator*(const QuadraticSurd& x, const QuadraticSurd& y);
    friend QuadraticSurd operator/(const QuadraticSurd& x, const Rational& r);
    bool operator==(const QuadraticSurd& o) const { return a_ == o.a_ && b_ == o.b_ && m_ == o.m_; }

    std::string to_string() const;

private:
    Rational a_ = 0, b_ = 0;
    Integer m_ = 0;
};

// sqrt of a non-negative rational as a surd.
QuadraticSurd surd_sqrt(const Rational& r);
// Rejects anything that would need a nested radical.
QuadraticSurd surd_sqrt(const QuadraticSurd& s);

// -1, 0, 1 for s < r, s == r, s > r.
int surd_cmp(const QuadraticSurd& s, const Rational& r);
int surd_cmp(const QuadraticSurd& s, const QuadraticSurd& t);
int surd_sign(const QuadraticSurd& s);

// c2(k) l^2 + c1(k) l + c0(k) with A already substituted into c2 (and
// anywhere else it appears).
struct QuadraticInL {
    PolyQ c2, c1, c0;

    int degree_in_l() const;
    QuadraticInL operator-() const { return {-c2, -c1, -c0}; }
    Rational eval(const Rational& k, const Rational& l) const;
    bool operator==(const QuadraticInL& o) const {
        return c2 == o.c2 && c1 == o.c1 && c0 == o.c0;
    }
};

QuadraticInL operator+(const QuadraticInL& f, const QuadraticInL& g);
QuadraticInL operator-(const QuadraticInL& f, const QuadraticInL& g);
QuadraticInL operator*(const PolyQ& p, const QuadraticInL& f);

// Resultant in l.  Uses the closed 2x2 form when both leading terms are
// nonzero, otherwise the Sylvester determinant of the true degrees.
PolyQ quad_resultant_in_l(const QuadraticInL& f, const QuadraticInL& g);

// Resultant through the Sylvester determinant of the true l-degrees.
PolyQ sylvester_resultant_in_l(const QuadraticInL& f, const QuadraticInL& g);

// Determinant of a small square matrix with PolyQ entries.
PolyQ poly_det(const std::vector<std::vector<PolyQ>>& m);

}  // namespace eincoh
