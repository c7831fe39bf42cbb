#include "eincoh/rational.hpp"

#include <cctype>
#include <regex>

namespace eincoh {

Rational make_q(long p, long q) {
    if (q == 0) throw std::domain_error("zero denominator");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

Rational make_q(const Integer& p, const Integer& q) {
    if (q == 0) throw std::domain_error("zero denominator");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

Rational parse_rational(const std::string& s) {
    static const std::regex re(R"(^([+-]?[0-9]+)(?:/([0-9]+))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw ParseError("not a rational p/q: '" + s + "'");
    Integer num(m[1].str()[0] == '+' ? m[1].str().substr(1) : m[1].str(), 10);
    Integer den(1);
    if (m[2].matched) den = Integer(m[2].str(), 10);
    if (den == 0) throw ParseError("zero denominator: '" + s + "'");
    return make_q(num, den);
}

Rational parse_rational_or_decimal(const std::string& s, bool* was_decimal) {
    if (was_decimal) *was_decimal = false;
    try {
        return parse_rational(s);
    } catch (const ParseError&) {
    }
    static const std::regex re(R"(^([+-]?)([0-9]*)\.?([0-9]*)(?:[eE]([+-]?[0-9]+))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, re) || (m[2].length() == 0 && m[3].length() == 0))
        throw ParseError("not a rational or decimal: '" + s + "'");
    std::string digits = m[2].str() + m[3].str();
    long exp10 = -static_cast<long>(m[3].length());
    if (m[4].matched) exp10 += std::stol(m[4].str());
    Integer num(digits.empty() ? std::string("0") : digits, 10);
    if (m[1].str() == "-") num = -num;
    Integer p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    if (was_decimal) *was_decimal = true;
    return exp10 < 0 ? make_q(num, p10) : Rational(num * p10);
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

int sign(const Rational& q) { return sgn(q); }

}  // namespace eincoh
