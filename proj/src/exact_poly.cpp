#include "eincoh/exact_poly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eincoh {

// ---------------------------------------------------------------- PolyQ

PolyQ::PolyQ(std::initializer_list<Rational> ascending) : c_(ascending) { trim(); }

PolyQ::PolyQ(std::vector<Rational> ascending) : c_(std::move(ascending)) { trim(); }

PolyQ::PolyQ(const Rational& c) {
    if (c != 0) c_.push_back(c);
}

PolyQ PolyQ::k() { return PolyQ{Rational(0), Rational(1)}; }

PolyQ PolyQ::from_descending(const std::vector<Rational>& desc) {
    return PolyQ(std::vector<Rational>(desc.rbegin(), desc.rend()));
}

void PolyQ::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational PolyQ::coeff(int i) const {
    if (i < 0 || i > degree()) return 0;
    return c_[static_cast<size_t>(i)];
}

Rational PolyQ::eval(const Rational& x) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double PolyQ::eval(double x) const {
    double acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->get_d();
    return acc;
}

PolyQ PolyQ::derivative() const {
    std::vector<Rational> d;
    for (size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long>(i));
    return PolyQ(std::move(d));
}

PolyQ PolyQ::operator-() const {
    PolyQ r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

PolyQ& PolyQ::operator+=(const PolyQ& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

PolyQ& PolyQ::operator-=(const PolyQ& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

PolyQ& PolyQ::operator*=(const PolyQ& o) {
    if (is_zero() || o.is_zero()) {
        c_.clear();
        return *this;
    }
    std::vector<Rational> r(c_.size() + o.c_.size() - 1, Rational(0));
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    c_ = std::move(r);
    trim();
    return *this;
}

void PolyQ::divmod(const PolyQ& d, PolyQ& q, PolyQ& r) const {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    r = *this;
    std::vector<Rational> qc;
    if (degree() >= d.degree()) qc.assign(static_cast<size_t>(degree() - d.degree() + 1), Rational(0));
    while (!r.is_zero() && r.degree() >= d.degree()) {
        int shift = r.degree() - d.degree();
        Rational f = r.lead() / d.lead();
        qc[static_cast<size_t>(shift)] = f;
        for (int i = 0; i <= d.degree(); ++i) r.c_[static_cast<size_t>(i + shift)] -= f * d.c_[static_cast<size_t>(i)];
        r.trim();
    }
    q = PolyQ(std::move(qc));
}

PolyQ PolyQ::monic() const {
    if (is_zero()) return *this;
    PolyQ r = *this;
    Rational l = lead();
    for (auto& c : r.c_) c /= l;
    return r;
}

std::string PolyQ::to_string(const char* var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const Rational& c = c_[static_cast<size_t>(i)];
        if (c == 0) continue;
        Rational a = abs(c);
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        bool unit = (a == 1) && i > 0;
        if (!unit) os << eincoh::to_string(a);
        if (i > 0) os << (unit ? "" : "*") << var;
        if (i > 1) os << "^" << i;
    }
    return os.str();
}

PolyQ operator+(PolyQ a, const PolyQ& b) { return a += b; }
PolyQ operator-(PolyQ a, const PolyQ& b) { return a -= b; }
PolyQ operator*(PolyQ a, const PolyQ& b) { return a *= b; }

PolyQ pow(const PolyQ& p, unsigned e) {
    PolyQ r(1L);
    for (unsigned i = 0; i < e; ++i) r *= p;
    return r;
}

PolyQ poly_gcd(PolyQ a, PolyQ b) {
    while (!b.is_zero()) {
        PolyQ q, r;
        a.divmod(b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

PolyQ exact_quotient(const PolyQ& a, const PolyQ& b) {
    PolyQ q, r;
    a.divmod(b, q, r);
    if (!r.is_zero()) throw std::domain_error("inexact polynomial division");
    return q;
}

PolyQ squarefree_part(const PolyQ& p) {
    if (p.degree() <= 0) return p;
    PolyQ g = poly_gcd(p, p.derivative());
    return exact_quotient(p, g);
}

// ---------------------------------------------------------------- Sturm

std::vector<PolyQ> sturm_sequence(const PolyQ& p) {
    std::vector<PolyQ> seq;
    if (p.is_zero()) return seq;
    seq.push_back(p);
    PolyQ d = p.derivative();
    if (d.is_zero()) return seq;
    seq.push_back(d);
    for (;;) {
        PolyQ q, r;
        seq[seq.size() - 2].divmod(seq.back(), q, r);
        if (r.is_zero()) break;
        seq.push_back(-r);
    }
    return seq;
}

int sign_variations(const std::vector<PolyQ>& seq, const Rational& x) {
    int var = 0, last = 0;
    for (const auto& p : seq) {
        int s = sgn(p.eval(x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++var;
        last = s;
    }
    return var;
}

namespace {

// For square-free q the variation count at a root equals its right-hand
// limit, so roots in the open interval are V(lo) - V(hi) - [q(hi) == 0].
int open_count(const std::vector<PolyQ>& seq, const Rational& lo, const Rational& hi) {
    int c = sign_variations(seq, lo) - sign_variations(seq, hi);
    if (seq.front().eval(hi) == 0) --c;
    return c;
}

void isolate(const std::vector<PolyQ>& seq, const Rational& lo, const Rational& hi,
             const Rational& width, std::vector<Interval>& out) {
    int c = open_count(seq, lo, hi);
    if (c == 0) return;
    if (c == 1 && hi - lo < width) {
        out.push_back({lo, hi});
        return;
    }
    Rational mid = (lo + hi) / 2;
    isolate(seq, lo, mid, width, out);
    if (seq.front().eval(mid) == 0) out.push_back({mid, mid});
    isolate(seq, mid, hi, width, out);
}

Rational isolation_width() {
    Rational w(1);
    mpq_div_2exp(w.get_mpq_t(), w.get_mpq_t(), 40);
    return w;
}

}  // namespace

int count_roots_open(const PolyQ& p, const Rational& lo, const Rational& hi) {
    if (p.is_zero()) throw std::domain_error("zero polynomial has infinitely many roots");
    if (!(lo < hi)) throw std::invalid_argument("count_roots_open: need lo < hi");
    return open_count(sturm_sequence(squarefree_part(p)), lo, hi);
}

SignResult sign_on_interval(const PolyQ& p, const Rational& lo, const Rational& hi, EndFlags ends) {
    if (!(lo < hi)) throw std::invalid_argument("sign_on_interval: need lo < hi");
    if (p.is_zero()) return {SignTag::ZeroPolynomial, {}};
    SignResult res{SignTag::Mixed, {}};
    if (!ends.open_lo && p.eval(lo) == 0) res.roots.push_back({lo, lo});
    if (p.degree() > 0) isolate(sturm_sequence(squarefree_part(p)), lo, hi, isolation_width(), res.roots);
    if (!ends.open_hi && p.eval(hi) == 0) res.roots.push_back({hi, hi});
    if (!res.roots.empty()) return res;
    res.tag = sgn(p.eval((lo + hi) / 2)) > 0 ? SignTag::StrictlyPositive : SignTag::StrictlyNegative;
    return res;
}

const char* to_string(SignTag t) {
    switch (t) {
        case SignTag::StrictlyPositive: return "StrictlyPositive";
        case SignTag::StrictlyNegative: return "StrictlyNegative";
        case SignTag::Mixed: return "Mixed";
        case SignTag::ZeroPolynomial: return "ZeroPolynomial";
    }
    return "?";
}

// ---------------------------------------------------------------- surds

QuadraticSurd::QuadraticSurd(const Rational& a) : a_(a) {}

QuadraticSurd::QuadraticSurd(const Rational& a, const Rational& b, const Integer& radicand)
    : a_(a), b_(b), m_(radicand) {
    if (m_ < 0) throw std::domain_error("negative radicand");
    if (b_ == 0 || m_ == 0) {
        b_ = 0;
        m_ = 0;
        return;
    }
    Integer s = 1, p = 2;
    while (p * p <= m_) {
        while (m_ % (p * p) == 0) {
            m_ /= p * p;
            s *= p;
        }
        ++p;
    }
    b_ *= Rational(s);
    if (m_ == 1) {
        a_ += b_;
        b_ = 0;
        m_ = 0;
    }
}

double QuadraticSurd::to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(m_.get_d()); }

QuadraticSurd QuadraticSurd::operator-() const { return {-a_, -b_, m_}; }

namespace {
Integer common_radicand(const QuadraticSurd& x, const QuadraticSurd& y) {
    if (x.m() == 0) return y.m();
    if (y.m() == 0 || x.m() == y.m()) return x.m();
    throw std::domain_error("surds with different radicands");
}
}  // namespace

QuadraticSurd operator+(const QuadraticSurd& x, const QuadraticSurd& y) {
    return {x.a_ + y.a_, x.b_ + y.b_, common_radicand(x, y)};
}

QuadraticSurd operator-(const QuadraticSurd& x, const QuadraticSurd& y) { return x + (-y); }

QuadraticSurd operator*(const QuadraticSurd& x, const QuadraticSurd& y) {
    Integer m = common_radicand(x, y);
    return {x.a_ * y.a_ + x.b_ * y.b_ * Rational(m), x.a_ * y.b_ + x.b_ * y.a_, m};
}

QuadraticSurd operator/(const QuadraticSurd& x, const Rational& r) {
    if (r == 0) throw std::domain_error("surd division by zero");
    return {x.a_ / r, x.b_ / r, x.m_};
}

std::string QuadraticSurd::to_string() const {
    if (m_ == 0) return eincoh::to_string(a_);
    std::string s = a_ == 0 ? "" : eincoh::to_string(a_) + (b_ < 0 ? " - " : " + ");
    if (a_ == 0 && b_ < 0) s += "-";
    return s + "(" + eincoh::to_string(abs(b_)) + ")*sqrt(" + m_.get_str() + ")";
}

QuadraticSurd surd_sqrt(const Rational& r) {
    if (r < 0) throw std::domain_error("square root of a negative rational");
    return {0, Rational(1) / Rational(r.get_den()), r.get_num() * r.get_den()};
}

QuadraticSurd surd_sqrt(const QuadraticSurd& s) {
    if (!s.is_rational()) throw std::domain_error("nested radical not supported");
    return surd_sqrt(s.a());
}

int surd_sign(const QuadraticSurd& s) {
    int sa = sgn(s.a()), sb = s.m() == 0 ? 0 : sgn(s.b());
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: compare a^2 against b^2 m
    Rational lhs = s.a() * s.a(), rhs = s.b() * s.b() * Rational(s.m());
    int c = cmp(lhs, rhs);
    return c == 0 ? 0 : (c > 0 ? sa : sb);
}

int surd_cmp(const QuadraticSurd& s, const Rational& r) { return surd_sign(s - QuadraticSurd(r)); }

int surd_cmp(const QuadraticSurd& s, const QuadraticSurd& t) { return surd_sign(s - t); }

// ---------------------------------------------------------------- QuadraticInL

int QuadraticInL::degree_in_l() const {
    if (!c2.is_zero()) return 2;
    if (!c1.is_zero()) return 1;
    if (!c0.is_zero()) return 0;
    return -1;
}

Rational QuadraticInL::eval(const Rational& k, const Rational& l) const {
    return (c2.eval(k) * l + c1.eval(k)) * l + c0.eval(k);
}

QuadraticInL operator+(const QuadraticInL& f, const QuadraticInL& g) {
    return {f.c2 + g.c2, f.c1 + g.c1, f.c0 + g.c0};
}

QuadraticInL operator-(const QuadraticInL& f, const QuadraticInL& g) {
    return {f.c2 - g.c2, f.c1 - g.c1, f.c0 - g.c0};
}

QuadraticInL operator*(const PolyQ& p, const QuadraticInL& f) { return {p * f.c2, p * f.c1, p * f.c0}; }

PolyQ poly_det(const std::vector<std::vector<PolyQ>>& m) {
    const size_t n = m.size();
    if (n == 0) return PolyQ(1L);
    if (n == 1) return m[0][0];
    PolyQ det;
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<PolyQ>> minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<PolyQ> row;
            for (size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[i][c]);
            minor.push_back(std::move(row));
        }
        PolyQ t = m[0][j] * poly_det(minor);
        if (j % 2) det -= t;
        else det += t;
    }
    return det;
}

PolyQ sylvester_resultant_in_l(const QuadraticInL& f, const QuadraticInL& g) {
    int p = f.degree_in_l(), q = g.degree_in_l();
    if (p < 0 || q < 0) return PolyQ();
    const PolyQ fc[3] = {f.c0, f.c1, f.c2}, gc[3] = {g.c0, g.c1, g.c2};
    const size_t n = static_cast<size_t>(p + q);
    std::vector<std::vector<PolyQ>> s(n, std::vector<PolyQ>(n));
    for (int r = 0; r < q; ++r)
        for (int i = 0; i <= p; ++i) s[static_cast<size_t>(r)][static_cast<size_t>(r + i)] = fc[p - i];
    for (int r = 0; r < p; ++r)
        for (int i = 0; i <= q; ++i) s[static_cast<size_t>(q + r)][static_cast<size_t>(r + i)] = gc[q - i];
    return poly_det(s);
}

PolyQ quad_resultant_in_l(const QuadraticInL& f, const QuadraticInL& g) {
    if (f.c2.is_zero() || g.c2.is_zero()) return sylvester_resultant_in_l(f, g);
    PolyQ u = f.c2 * g.c0 - f.c0 * g.c2;
    PolyQ v = f.c2 * g.c1 - f.c1 * g.c2;
    PolyQ w = f.c1 * g.c0 - f.c0 * g.c1;
    return u * u - v * w;
}

}  // namespace eincoh
