#pragma once

#include "eincoh/thresholds.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eincoh {

enum class Family { TypeI, TypeII, TypeIII, GeneralizedWallach, S3OverProduct };

const char* to_string(Family f);
Family family_from_string(const std::string& s);  // throws CatalogError

struct Groups {
    std::string K, H, G;
};

struct OrbitRecord {
    std::string name;
    Family family = Family::TypeI;
    Groups groups;
    int d1 = 0, d2 = 0;
    std::map<std::string, Rational> params;
    Rational A;                          // from the family formula when params allow, else printed
    std::optional<Rational> printed_A;   // the value the source table prints, if any
    std::optional<VerdictTag> expected;
    std::string table;                   // label used by render_tables
    std::optional<std::string> generator;
    std::optional<long> m;               // index within a generated family

    StructuralTriple triple() const { return {d1, d2, A}; }
};

struct CatalogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Range violations throw std::invalid_argument.
Rational a_type_one(const Rational& alpha, const Rational& c1s, const Rational& c2s, int d1, int d2);
Rational a_generalized_wallach(const Rational& a1, int d1, int d2);
Rational a_type_three(const Rational& alpha, const std::optional<Rational>& beta,
                      const Rational& dimM, int d2);
Rational a_s3_over_product(const Rational& alpha, const Rational& cstar, int d1, int d2);

// The family formula applied to a record's params; nullopt when the family has
// no formula or params are missing.
std::optional<Rational> formula_A(Family f, const std::map<std::string, Rational>& params, int d1,
                                  int d2);

// Rational arithmetic expression in the single variable m: integers, + - * / ^,
// parentheses.  Throws CatalogError on syntax errors or division by zero.
Rational eval_m_expression(const std::string& expr, long m);

// Validates the schema and expands generators.  Throws CatalogError.
std::vector<OrbitRecord> parse_catalog(const nlohmann::json& doc);
std::vector<OrbitRecord> load_catalog(const std::string& path);

// EINCOH_CATALOG when set, else the shipped resource.
std::string default_catalog_path();
std::vector<OrbitRecord> builtin_catalog();

struct CheckResult {
    std::string name;
    StructuralTriple triple;
    bool A_matches = true;  // formula value equals the printed one (vacuous when either is absent)
    VerdictTag verdict = VerdictTag::Indeterminable;
    bool verdict_matches = true;  // vacuous without an expected tag
    bool ok() const { return A_matches && verdict_matches; }
};

// One task per record; results keep catalog order.
std::vector<CheckResult> check_catalog(const std::vector<OrbitRecord>& records);

// table label -> rendered plain-text table, one row per record.
std::map<std::string, std::string> render_tables(const std::vector<OrbitRecord>& records);

}  // namespace eincoh
