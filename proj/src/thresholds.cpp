#include "eincoh/thresholds.hpp"

#include <iomanip>
#include <sstream>

namespace eincoh {

namespace {

Rational q(long v) { return Rational(v); }

std::string dims(int d1, int d2) { return "(" + std::to_string(d1) + "," + std::to_string(d2) + ")"; }

}  // namespace

void StructuralTriple::validate() const {
    if (d1 < 2) throw DimensionError("d1 must be >= 2, got " + std::to_string(d1));
    if (d2 < d1) throw DimensionError("need d2 >= d1, got " + dims(d1, d2));
    if (A < 0) throw std::invalid_argument("A must be >= 0, got " + to_string(A));
}

// ------------------------------------------------------------ families

PolynomialFamilySet build_families(int d1, int d2) {
    StructuralTriple{d1, d2, 0}.validate();
    const Rational a = d1, b = d2, n = d1 + d2;
    const PolyQ k = PolyQ::k(), k2 = k * k, k3 = k2 * k, k4 = k3 * k, k5 = k4 * k;
    auto P = [](const Rational& c) { return PolyQ(c); };

    PolynomialFamilySet f;
    f.d1 = d1;
    f.d2 = d2;

    f.P_X = (P(b * (a * b - 2 * a - b + 1)) * k2 + P(2 * (b - 1) * (a - 1) * a) * k + P(a * a * (a - 1))) *
            (P(1) - k) * P(Rational(1) / (a * (n - 1)));

    const PolyQ bk_2a = P(b / (2 * a)) * k;
    f.Q_X = P(4) * k * (P(1) + bk_2a) * (P(a) + P(b) * k + bk_2a) +
            (P(2) + P(2) * k + P(3 * b / a) * k) * f.T_X() * P(Rational(1) / (n - 1));

    f.omega2 = P(2 * a * a * b * b - a * b * b * b + b * b * b - b * b) * k3 +
               P(4 * a * a * a * b - 4 * a * a * b * b - 2 * a * a * b + 4 * a * b * b - 2 * a * b) * k2 +
               P(2 * a * a * a * a - 5 * a * a * a * b - 2 * a * a * a + 5 * a * a * b) * k +
               P(-2 * a * a * a * a + 2 * a * a * a);
    f.omega1 = P(a * b * b * b - 4 * a * b * b - b * b * b + 3 * b * b) * k3 +
               P(2 * a * a * b * b - 8 * a * a * b + 8 * a * b - 2 * b * b) * k2 +
               P(a * a * a * b - 4 * a * a * a + 5 * a * a * b + 4 * a * a - 6 * a * b) * k +
               P(4 * a * a * a - 4 * a * a);
    f.omega0 = P(a * b * b * b - 2 * a * b * b - b * b * b - 2 * a * b + b * b) * k2 +
               P(2 * a * a * b * b - 2 * a * a * b - 2 * a * b * b - 4 * a * a + 4 * a * b) * k +
               P(a * a * a * b - a * a * b + 4 * a * a);

    f.beta0 = P(a * b * b - 2 * a * b - b * b + b) * k2 + P(2 * a * a * b - 2 * a * a - a * b + 2 * a) * k +
              P(a * a * a - a);
    f.beta1 = P(2 * a * a * b * b + a * b * b * b - 4 * a * a * b - 2 * a * b * b - b * b * b - 2 * a * b + 2 * b) * k2 +
              P(4 * a * a * a * b + 2 * a * a * b * b - 4 * a * a * a - 2 * a * a * b - 3 * a * b * b + 4 * a * b +
                b * b + 4 * a - 2 * b) *
                  k +
              P(2 * a * a * a * a + a * a * a * b - 2 * a * a * b + 2 * a * a + a * b - 4 * a);
    f.beta2 = P(a * b * b * b - 2 * a * b * b - b * b * b + b * b) * k3 +
              P(2 * a * a * b * b - 4 * a * a * b - 2 * a * b * b + 2 * a * b) * k2 +
              P(a * a * a * b - 2 * a * a * a + a * a * b) * k + P(2 * a * a * a);
    f.beta3 = P(a * b * b - 2 * a * b - b * b + b) * k2 + P(2 * a * a * b - 2 * a * a - 2 * a * b + 2 * a) * k +
              P(a * a * a - a * a);
    f.beta_tilde = P(2 * a * a * b * b + 2 * a * b * b * b - 2 * a * b * b - b * b * b + b * b) * k2 +
                   P(4 * a * a * a * b + 4 * a * a * b * b - 6 * a * a * b - 4 * a * b * b + 2 * a * b) * k +
                   P(2 * a * a * a * a + 2 * a * a * a * b - 4 * a * a * a - 3 * a * a * b + 2 * a * a + a * b);

    // Theta = theta2 A^2 + theta1 A + theta0
    {
        const PolyQ t2a = f.omega0, t2b = f.omega2;
        f.theta2 = P(4 * a * a * a * a * (a + 1) * (a + 1)) * t2a * t2b;
        const Rational t1a = -4 * a * a * b * (b - 1) * (b - 1) * (a + 1);
        const Rational a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a, a6 = a5 * a, a7 = a6 * a;
        const Rational b2 = b * b, b3 = b2 * b, b4 = b3 * b, b5 = b4 * b;
        const PolyQ t1b =
            P(a3 * b5 - a2 * b5 - 4 * a3 * b3 + 3 * a2 * b4 - a * b4 + 2 * a * b3 - b4) * k5 +
            P(4 * a4 * b4 + 4 * a4 * b3 - 6 * a3 * b4 - 16 * a4 * b2 + 18 * a3 * b3 + 2 * a2 * b4 + 4 * a3 * b2 -
              10 * a2 * b3 + 8 * a2 * b2 - 6 * a * b3) *
                k4 +
            P(6 * a5 * b3 + 12 * a5 * b2 - 14 * a4 * b3 - 20 * a5 * b + 35 * a4 * b2 + 7 * a3 * b3 + 12 * a4 * b -
              29 * a3 * b2 + a2 * b3 + 8 * a3 * b - 12 * a2 * b2) *
                k3 +
            P(4 * a6 * b2 + 12 * a6 * b - 16 * a5 * b2 - 8 * a6 + 28 * a5 * b + 8 * a4 * b2 + 8 * a5 - 32 * a4 * b +
              4 * a3 * b2 - 8 * a3 * b) *
                k2 +
            P(a7 * b + 4 * a7 - 9 * a6 * b + 8 * a6 + 3 * a5 * b - 12 * a5 + 5 * a4 * b) * k + P(-2 * a7 + 2 * a5);
        f.theta1 = P(t1a) * t1b;
        const PolyQ t0a = P(b2 * (b - 1) * (b - 1) * (b - 1) * (b - 1)) * k * (P(2 * a) + P(b) * k) *
                          (P(2 * a * b - 2 * a + b) * k + P(2 * a2 + 2 * a));
        const PolyQ t0b = P((2 * a2 - 1) * b2) * k2 + P((4 * a3 - 2 * a2 - 2 * a) * b) * k + P(2 * a3 * (a - 1));
        f.theta0 = t0a * t0b;
    }

    {
        const PolyQ s = P(2 * b * b + b) * k2 + P(4 * a * b + 2 * a) * k + P(2 * a * a);
        f.rho1 = P(4 * a * a * (a - 1)) * s * s;
        const PolyQ apbk = P(a) + P(b) * k;
        f.rho0 = P((b - 1) * (b - 1) * b) * k * (P(4 * a) + P(3 * b) * k) *
                 (P(4 * (a - 1)) * apbk * apbk + P(b * b) * k2);
        f.rho3 = P(2 * b * b * b + b * b) * k3 + P(8 * a * b * b - 2 * a * b - 5 * b * b + 2 * b) * k2 +
                 P(10 * a * a * b - 4 * a * a - 10 * a * b + 4 * a) * k + P(4 * a * a * a - 4 * a * a);
    }

    f.alpha1 = f.omega1;
    f.alpha2 = f.beta3;
    f.alpha3 = P(a * b * b + a * b - b * b) * k2 + P(2 * a * a * b + 2 * a * a - 4 * a * b) * k +
               P(a * a * a - 4 * a * a);
    {
        const Rational a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
        const Rational b2 = b * b, b3 = b2 * b, b4 = b3 * b;
        f.alpha4 = P(-a3 * b3 + a2 * b4 + 4 * a3 * b2 - 2 * a2 * b3 - 2 * a * b4 - a2 * b2 + 4 * a * b3 + b4 -
                     a * b2 - b3) *
                       k3 +
                   P(-2 * a4 * b2 + 4 * a3 * b3 + 8 * a4 * b - 8 * a3 * b2 - 8 * a2 * b3 - 8 * a3 * b + 14 * a2 * b2 +
                     4 * a * b3 - 4 * a * b2) *
                       k2 +
                   P(-a5 * b + 5 * a4 * b2 + 4 * a5 - 10 * a4 * b - 10 * a3 * b2 - 8 * a4 + 17 * a3 * b +
                     5 * a2 * b2 + 4 * a3 - 6 * a2 * b) *
                       k +
                   P(2 * a5 * b - 4 * a5 - 4 * a4 * b + 8 * a4 + 2 * a3 * b - 4 * a3);
    }
    return f;
}

PolyQ PolynomialFamilySet::T_X() const {
    const Rational a = d1, b = d2;
    const PolyQ k = PolyQ::k();
    const PolyQ s = PolyQ(a) + PolyQ(b) * k;
    return PolyQ(a) + PolyQ(b) * k * k - s * s;
}

Rational PolynomialFamilySet::tau(const Rational& A) const {
    const Rational a = d1, b = d2;
    return (b - 1) - (a + 1) / (b * (b - 1)) * 2 * a * a * A;
}

Rational PolynomialFamilySet::sigma(const Rational& A) const {
    if (A == 0) throw std::domain_error("sigma undefined at A = 0");
    const Rational a = d1, b = d2;
    return b * (b - 1) / (2 * a * a * A);
}

QuadraticInL PolynomialFamilySet::P_Y(const Rational& A) const {
    const Rational a = d1, b = d2, n = d1 + d2;
    const PolyQ k = PolyQ::k();
    return {-(PolyQ(a * (n + a - 2)) + PolyQ(b * (n + a - 1)) * k) * PolyQ(A / (b * (n - 1))),
            (PolyQ(a - 1) + PolyQ(b) * k) * PolyQ((b - 1) / (n - 1)),
            (PolyQ(a) + PolyQ(b - 1) * k) * PolyQ(-(a - 1) / (n - 1))};
}

QuadraticInL PolynomialFamilySet::Q_Y(const Rational& A) const {
    const Rational a = d1, b = d2, n = d1 + d2;
    const PolyQ k = PolyQ::k();
    return {(PolyQ(2 * n + b) * k + PolyQ(2 * a)) * PolyQ(-A / (n - 1)),
            (PolyQ(2 * a * (a - 1)) + PolyQ(a * b - 3 * b) * k) * PolyQ(-(b - 1) / (a * (n - 1))),
            (PolyQ(2 * a) + PolyQ(b + 2) * k) * PolyQ((a - 1) / (n - 1))};
}

QuadraticInL PolynomialFamilySet::omega(const Rational& A) const {
    const Rational a = d1, b = d2, n = d1 + d2;
    const PolyQ k = PolyQ::k();
    const Rational s = Rational(1) / (a * a * (n - 1));
    return {(PolyQ(2 * a) + PolyQ(b) * k) * omega2 * PolyQ(s * A / b), PolyQ(s * (b - 1)) * k * omega1,
            PolyQ(-s * (a - 1)) * k * k * omega0};
}

QuadraticInL PolynomialFamilySet::T_Y(const Rational& A) const {
    const Rational a = d1, b = d2, n = d1 + d2;
    return {PolyQ(-a * A), PolyQ(b * (b - 1) - (n - 1) * tau(A)), PolyQ(a * (a - 1))};
}

QuadraticInL PolynomialFamilySet::zeta(const Rational& A) const {
    const Rational a = d1, b = d2;
    const PolyQ k = PolyQ::k();
    const PolyQ s = PolyQ(a) + PolyQ(b) * k;
    QuadraticInL z;
    z.c2 = s * (s - PolyQ(1)) * (PolyQ(2 * a) + PolyQ(b) * k) * PolyQ(-A / b);
    z.c1 = PolyQ((b - 1) / a) * s * (PolyQ(b) * k * k + PolyQ(b * (a - 1)) * k + PolyQ(a * (a - 1))) -
           (PolyQ(1) - k) * beta3 * PolyQ(tau(A) / a);
    z.c0 = PolyQ(-(a - 1)) * k * s * (s + PolyQ(1) - PolyQ(2) * k);
    return z;
}

PolyQ PolynomialFamilySet::Theta(const Rational& A) const {
    return theta2 * PolyQ(A * A) + theta1 * PolyQ(A) + theta0;
}

// ------------------------------------------------------------ thresholds

DiscriminantMu discriminant_and_mu(const StructuralTriple& t) {
    t.validate();
    const Rational a = t.d1, b = t.d2, n = t.n();
    DiscriminantMu r;
    r.delta = (b - 1) * (b - 1) - 4 * (a - 1) * (n + a) * t.A / b;
    if (t.A == 0) {
        r.mu2 = QuadraticSurd((a - 1) / (b - 1));
        r.mu1_infinite = true;
        return r;
    }
    if (r.delta < 0) return r;
    const Rational two_lead = 2 * (n + a) * t.A / b;
    const QuadraticSurd root = surd_sqrt(r.delta);
    r.mu1 = (QuadraticSurd(b - 1) + root) / two_lead;
    r.mu2 = (QuadraticSurd(b - 1) - root) / two_lead;
    return r;
}

Rational psi(int d1, int d2) {
    StructuralTriple{d1, d2, 0}.validate();
    const Rational a = d1, b = d2, n = d1 + d2;
    const Rational s = 2 * n * n + n + a;
    return (4 * (a - 1) * n * n + b * b) * (3 * n + a) / (s * s * a * a) * b * (b - 1) * (b - 1) / (4 * (a - 1));
}

Rational chi_tilde(int d1, int d2) {
    StructuralTriple{d1, d2, 0}.validate();
    const Rational b = d2;
    const Rational base = b * (b - 1) * (b - 1) / ((b + 8) * (b + 8));
    if (d1 == 2) return 4 * base;
    if (d1 == 3) return d2 <= 19 ? base : Rational(3, 2) * base;
    throw DimensionError("chi_tilde is defined only for d1 in {2,3}, got " + dims(d1, d2));
}

QuadraticSurd a1_threshold(int d1, int d2) {
    StructuralTriple{d1, d2, 0}.validate();
    const Rational b = d2;
    const Rational b2 = b * b, b3 = b2 * b, b4 = b3 * b;
    if (d1 == 2 && d2 >= 3) {
        const Rational den = 4 * b * (b3 - 8 * b2 - 16 * b - 16);
        const Rational sq = (b - 1) * (b - 1) / den;
        Integer rad = Rational(2 * b2 + 4 * b + 4).get_num();
        return {sq * (-5 * b4 - 12 * b3 + 8 * b2 + 32 * b + 32), sq * (4 * b3 - 8 * b - 16), rad};
    }
    if (d1 == 3) {
        const Rational den = 9 * b * (2 * b3 - 9 * b2 - 36 * b - 36);
        const Rational sq = (b - 1) * (b - 1) / den;
        Integer rad = Rational(3 * b2 + 9 * b + 9).get_num();
        return {sq * (-6 * b4 - 23 * b3 + 72 * b + 72), sq * (4 * b3 + 4 * b2 - 12 * b - 24), rad};
    }
    const Rational a = d1;
    return QuadraticSurd(b * (b - 1) * (b - 1) / (a * a * (a * b - b + 4)));
}

Rational bohm_lower(int d1, int d2) {
    const Rational a = d1, b = d2, n = d1 + d2;
    return b * (b - 1) * (b - 1) / (4 * (a - 1) * (n + a));
}

std::optional<Rational> bohm_focus_upper(int d1, int d2) {
    const Rational a = d1, b = d2, n = d1 + d2;
    const Rational den = a * n - 8 * n - 9 * a;
    if (den == 0) return std::nullopt;
    return (9 - n) * (b * n + 7 * n + 9 * a) / (den * den) * b * (b - 1) * (b - 1) / (4 * (a - 1));
}

bool check_a2_sufficient(const StructuralTriple& t) {
    t.validate();
    const auto f = build_families(t.d1, t.d2);
    return sign_on_interval(f.Theta(t.A), 0, 1, kOpen).tag == SignTag::StrictlyPositive;
}

bool focus_condition(const StructuralTriple& t) {
    t.validate();
    const auto ub = bohm_focus_upper(t.d1, t.d2);
    if (!ub || *ub <= 0) return false;
    return t.A < *ub;
}

OmegaXi omega_xi_bounds(int d1, int d2, const Rational& k) {
    StructuralTriple{d1, d2, 0}.validate();
    if (k < 0 || k > 1) throw std::invalid_argument("omega_xi_bounds: k outside [0,1]");
    const auto f = build_families(d1, d2);
    const Rational a = d1, b = d2, n = d1 + d2;
    const Rational w0 = f.omega0.eval(k), w1 = f.omega1.eval(k), w2 = f.omega2.eval(k);
    const Rational den = (2 * a + b * k) * w0 * w2;
    if (den == 0) throw std::domain_error("omega_xi_bounds: zero denominator");
    const Rational scale = b * (b - 1) * (b - 1) / (4 * (a - 1));
    OmegaXi r;
    r.omega = -w1 * w1 / den * scale;
    const Rational xden = (a + k * b - k) * (a * (n + a - 2) + b * (n + a - 1) * k);
    if (xden == 0) throw std::domain_error("omega_xi_bounds: zero denominator in Xi");
    const Rational t = a + b * k - 1;
    r.xi = scale * t * t / xden;
    return r;
}

// ------------------------------------------------------------ classify

const char* to_string(VerdictTag t) {
    switch (t) {
        case VerdictTag::ExistenceProduct: return "ExistenceProduct";
        case VerdictTag::Existence: return "Existence";
        case VerdictTag::TwoMetricsNumeric: return "TwoMetricsNumeric";
        case VerdictTag::NonexistenceBohm: return "NonexistenceBohm";
        case VerdictTag::NonexistenceTwoSummands: return "NonexistenceTwoSummands";
        case VerdictTag::Indeterminable: return "Indeterminable";
    }
    return "?";
}

VerdictTag verdict_from_string(const std::string& s) {
    for (auto t : {VerdictTag::ExistenceProduct, VerdictTag::Existence, VerdictTag::TwoMetricsNumeric,
                   VerdictTag::NonexistenceBohm, VerdictTag::NonexistenceTwoSummands, VerdictTag::Indeterminable})
        if (s == to_string(t)) return t;
    throw std::invalid_argument("unknown verdict tag '" + s + "'");
}

Verdict classify(const StructuralTriple& t) {
    t.validate();
    Verdict v;
    auto note = [&](std::string pred, std::string val, bool holds) {
        v.evidence.push_back({std::move(pred), std::move(val), holds});
        return holds;
    };
    const std::string A = to_string(t.A);

    if (note("A == 0", A, t.A == 0)) {
        v.tag = VerdictTag::ExistenceProduct;
        return v;
    }
    const auto dm = discriminant_and_mu(t);
    if (note("delta <= 0", to_string(dm.delta), dm.delta <= 0)) {
        v.tag = VerdictTag::NonexistenceBohm;
        return v;
    }
    const bool small = t.d1 == 2 && t.d2 <= 4;
    if (small) {
        note("A >= psi skipped for " + dims(t.d1, t.d2), "n/a", false);
    } else {
        const Rational p = psi(t.d1, t.d2);
        if (note("A >= psi", A + " vs " + to_string(p), t.A >= p)) {
            v.tag = VerdictTag::NonexistenceTwoSummands;
            return v;
        }
    }
    if (t.d1 == 2 || t.d1 == 3) {
        const Rational c = chi_tilde(t.d1, t.d2);
        if (note("A <= chi_tilde", A + " vs " + to_string(c), t.A <= c)) {
            v.tag = VerdictTag::Existence;
            return v;
        }
    }
    const QuadraticSurd a1 = a1_threshold(t.d1, t.d2);
    const bool below_a1 = surd_cmp(a1, t.A) > 0;
    note("A < A1", A + " vs " + a1.to_string(), below_a1);
    if (below_a1) {
        const bool a2 = check_a2_sufficient(t);
        if (note("Theta(A,k) > 0 on (0,1)", a2 ? "certified" : "sufficient check failed", a2)) {
            v.tag = VerdictTag::Existence;
            return v;
        }
    }
    v.tag = VerdictTag::Indeterminable;
    return v;
}

// ------------------------------------------------------------ report

ThresholdReport threshold_report(const StructuralTriple& t) {
    t.validate();
    ThresholdReport r;
    r.triple = t;
    r.delta = discriminant_and_mu(t).delta;
    r.bohm_lower = bohm_lower(t.d1, t.d2);
    r.bohm_focus_upper = bohm_focus_upper(t.d1, t.d2);
    if (t.d1 == 2 || t.d1 == 3) r.chi_tilde = chi_tilde(t.d1, t.d2);
    r.psi = psi(t.d1, t.d2);
    r.a1 = a1_threshold(t.d1, t.d2);
    r.a2_check = check_a2_sufficient(t);
    r.omega_at_0 = omega_xi_bounds(t.d1, t.d2, 0).omega;
    r.omega_at_1 = omega_xi_bounds(t.d1, t.d2, 1).omega;
    r.focus = focus_condition(t);
    return r;
}

nlohmann::ordered_json rational_json(const Rational& v) { return to_string(v); }

nlohmann::ordered_json surd_json(const QuadraticSurd& s) {
    if (s.is_rational()) return to_string(s.a());
    nlohmann::ordered_json j;
    j["a"] = to_string(s.a());
    j["b"] = to_string(s.b());
    j["m"] = s.m().get_si();
    return j;
}

nlohmann::ordered_json to_json(const ThresholdReport& r) {
    nlohmann::ordered_json j;
    j["d1"] = r.triple.d1;
    j["d2"] = r.triple.d2;
    j["A"] = to_string(r.triple.A);
    j["delta"] = to_string(r.delta);
    j["bohm_lower"] = to_string(r.bohm_lower);
    j["bohm_focus_upper"] = r.bohm_focus_upper ? nlohmann::ordered_json(to_string(*r.bohm_focus_upper)) : nullptr;
    j["chi_tilde"] = r.chi_tilde ? nlohmann::ordered_json(to_string(*r.chi_tilde)) : nullptr;
    j["psi"] = to_string(r.psi);
    j["a1"] = surd_json(r.a1);
    j["a1_approx"] = r.a1.to_double();
    j["a2_check"] = r.a2_check;
    j["omega_at_0"] = to_string(r.omega_at_0);
    j["omega_at_1"] = to_string(r.omega_at_1);
    j["focus_condition"] = r.focus;
    return j;
}

nlohmann::ordered_json to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(v.tag);
    auto ev = nlohmann::ordered_json::array();
    for (const auto& e : v.evidence) ev.push_back({{"predicate", e.predicate}, {"value", e.value}, {"holds", e.holds}});
    j["evidence"] = ev;
    return j;
}

std::string to_table(const ThresholdReport& r) {
    std::ostringstream os;
    auto row = [&](const std::string& k, const std::string& v, double approx) {
        os << std::left << std::setw(18) << k << std::setw(44) << v;
        os << std::setprecision(10) << approx << "\n";
    };
    auto opt = [&](const std::string& k, const std::optional<Rational>& v) {
        if (v) row(k, to_string(*v), v->get_d());
        else os << std::left << std::setw(18) << k << "undefined\n";
    };
    os << "(d1,d2,A) = (" << r.triple.d1 << "," << r.triple.d2 << "," << to_string(r.triple.A) << ")\n";
    row("delta", to_string(r.delta), r.delta.get_d());
    row("bohm_lower", to_string(r.bohm_lower), r.bohm_lower.get_d());
    opt("bohm_focus_upper", r.bohm_focus_upper);
    opt("chi_tilde", r.chi_tilde);
    row("psi", to_string(r.psi), r.psi.get_d());
    row("a1", r.a1.to_string(), r.a1.to_double());
    row("omega_at_0", to_string(r.omega_at_0), r.omega_at_0.get_d());
    row("omega_at_1", to_string(r.omega_at_1), r.omega_at_1.get_d());
    os << std::left << std::setw(18) << "a2_check" << (r.a2_check ? "true" : "false") << "\n";
    os << std::left << std::setw(18) << "focus_condition" << (r.focus ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace eincoh
