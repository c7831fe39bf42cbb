#pragma once

#include "eincoh/exact_poly.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace eincoh {

struct StructuralTriple {
    int d1 = 2;
    int d2 = 2;
    Rational A = 0;

    int n() const { return d1 + d2; }
    void validate() const;  // throws DimensionError / std::invalid_argument
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Every named k-polynomial for a fixed (d1, d2).  The l-quadratics that
// carry A are produced on demand.
struct PolynomialFamilySet {
    int d1 = 0, d2 = 0;

    PolyQ P_X, Q_X;
    PolyQ omega0, omega1, omega2;
    PolyQ beta0, beta1, beta2, beta3, beta_tilde;
    PolyQ theta0, theta1, theta2;
    PolyQ rho0, rho1, rho3;
    PolyQ alpha1, alpha2, alpha3, alpha4;

    QuadraticInL P_Y(const Rational& A) const;
    QuadraticInL Q_Y(const Rational& A) const;
    QuadraticInL omega(const Rational& A) const;
    QuadraticInL zeta(const Rational& A) const;
    QuadraticInL T_Y(const Rational& A) const;
    PolyQ T_X() const;
    Rational tau(const Rational& A) const;
    Rational sigma(const Rational& A) const;

    // theta2 A^2 + theta1 A + theta0
    PolyQ Theta(const Rational& A) const;
};

PolynomialFamilySet build_families(int d1, int d2);

struct DiscriminantMu {
    Rational delta;
    QuadraticSurd mu1, mu2;  // mu1 >= mu2; meaningful only when delta >= 0
    bool mu1_infinite = false;  // A == 0
};

DiscriminantMu discriminant_and_mu(const StructuralTriple& t);

Rational psi(int d1, int d2);
Rational chi_tilde(int d1, int d2);  // d1 in {2, 3}
QuadraticSurd a1_threshold(int d1, int d2);
Rational bohm_lower(int d1, int d2);
std::optional<Rational> bohm_focus_upper(int d1, int d2);

bool check_a2_sufficient(const StructuralTriple& t);
bool focus_condition(const StructuralTriple& t);

struct OmegaXi {
    Rational omega, xi;
};
OmegaXi omega_xi_bounds(int d1, int d2, const Rational& k);

enum class VerdictTag {
    ExistenceProduct,
    Existence,
    TwoMetricsNumeric,
    NonexistenceBohm,
    NonexistenceTwoSummands,
    Indeterminable
};

const char* to_string(VerdictTag t);
VerdictTag verdict_from_string(const std::string& s);  // throws std::invalid_argument

struct Evidence {
    std::string predicate;
    std::string value;
    bool holds = false;
};

struct Verdict {
    VerdictTag tag = VerdictTag::Indeterminable;
    std::vector<Evidence> evidence;
};

Verdict classify(const StructuralTriple& t);

struct ThresholdReport {
    StructuralTriple triple;
    Rational delta;
    Rational bohm_lower;
    std::optional<Rational> bohm_focus_upper;
    std::optional<Rational> chi_tilde;
    Rational psi;
    QuadraticSurd a1;
    bool a2_check = false;
    Rational omega_at_0, omega_at_1;
    bool focus = false;
};

ThresholdReport threshold_report(const StructuralTriple& t);

nlohmann::ordered_json rational_json(const Rational& q);
nlohmann::ordered_json surd_json(const QuadraticSurd& s);  // plain string when rational
nlohmann::ordered_json to_json(const ThresholdReport& r);
nlohmann::ordered_json to_json(const Verdict& v);
std::string to_table(const ThresholdReport& r);

}  // namespace eincoh
