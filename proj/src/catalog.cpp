#include "eincoh/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <set>
#include <sstream>

#ifndef EINCOH_DEFAULT_CATALOG
#define EINCOH_DEFAULT_CATALOG "data/catalog.json"
#endif

namespace eincoh {

using nlohmann::json;

const char* to_string(Family f) {
    switch (f) {
        case Family::TypeI: return "TypeI";
        case Family::TypeII: return "TypeII";
        case Family::TypeIII: return "TypeIII";
        case Family::GeneralizedWallach: return "GeneralizedWallach";
        case Family::S3OverProduct: return "S3OverProduct";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    for (auto f : {Family::TypeI, Family::TypeII, Family::TypeIII, Family::GeneralizedWallach,
                   Family::S3OverProduct})
        if (s == to_string(f)) return f;
    throw CatalogError("unknown family '" + s + "'");
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool in_open_unit(const Rational& x) { return x > 0 && x < 1; }

}  // namespace

Rational a_type_one(const Rational& alpha, const Rational& c1s, const Rational& c2s, int d1, int d2) {
    require(in_open_unit(alpha), "a_type_one: alpha must lie in (0,1)");
    require(c1s >= 0 && c2s >= 0, "a_type_one: Casimir constants must be nonnegative");
    StructuralTriple{d1, d2, 0}.validate();
    const Rational e = 2 * c2s + 1;
    return (1 - alpha) * alpha * (2 * c1s + 1) / (e * e) * (d2 - 1) * (d2 - 1) / (d1 - 1);
}

Rational a_generalized_wallach(const Rational& a1, int d1, int d2) {
    require(a1 > 0 && a1 < Rational(1, 2), "a_generalized_wallach: a1 must lie in (0,1/2)");
    StructuralTriple{d1, d2, 0}.validate();
    return a1 * (1 - 2 * a1) * (d2 - 1) * (d2 - 1) / (d1 - 1);
}

Rational a_type_three(const Rational& alpha, const std::optional<Rational>& beta, const Rational& dimM,
                      int d2) {
    require(in_open_unit(alpha), "a_type_three: alpha must lie in (0,1)");
    require(dimM >= 0 && dimM.get_den() == 1, "a_type_three: dim M must be a nonnegative integer");
    StructuralTriple{3, d2, 0}.validate();
    Rational b = 0;
    if (dimM != 0) {
        require(beta.has_value(), "a_type_three: beta is required when dim M > 0");
        require(*beta >= 0 && *beta <= 1, "a_type_three: beta must lie in [0,1]");
        b = *beta;
    }
    const Rational den = d2 + 2 * dimM * (1 - b) + 6 * (1 - alpha);
    const Rational dd = Rational(d2) * (d2 - 1);
    return alpha * (1 - alpha) / (den * den) * dd * dd / 2;
}

Rational a_s3_over_product(const Rational& alpha, const Rational& cstar, int d1, int d2) {
    require(in_open_unit(alpha), "a_s3_over_product: alpha must lie in (0,1)");
    require(cstar >= 0, "a_s3_over_product: c* must be nonnegative");
    StructuralTriple{d1, d2, 0}.validate();
    const Rational e = 1 + 2 * cstar;
    return 2 * alpha * (1 - alpha) / (e * e) * (d2 - 1) * (d2 - 1) / (d1 - 1);
}

std::optional<Rational> formula_A(Family f, const std::map<std::string, Rational>& params, int d1,
                                  int d2) {
    if (params.empty() || f == Family::TypeII) return std::nullopt;
    auto get = [&](const char* key) {
        auto it = params.find(key);
        if (it == params.end())
            throw CatalogError(std::string(to_string(f)) + " record needs parameter '" + key + "'");
        return it->second;
    };
    switch (f) {
        case Family::TypeI: return a_type_one(get("alpha"), get("c1s"), get("c2s"), d1, d2);
        case Family::TypeIII: {
            if (d1 != 3) throw CatalogError("TypeIII records have d1 = 3");
            auto b = params.find("beta");
            return a_type_three(get("alpha"),
                                b == params.end() ? std::nullopt : std::optional<Rational>(b->second),
                                get("dimM"), d2);
        }
        case Family::GeneralizedWallach: return a_generalized_wallach(get("a1"), d1, d2);
        case Family::S3OverProduct: return a_s3_over_product(get("alpha"), get("cstar"), d1, d2);
        case Family::TypeII: break;
    }
    return std::nullopt;
}

namespace {

class ExprParser {
public:
    ExprParser(const std::string& s, long m) : s_(s), m_(m) {}

    Rational run() {
        Rational v = sum();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw CatalogError("expression '" + s_ + "': " + why);
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    Rational sum() {
        Rational v = product();
        for (;;) {
            if (eat('+')) v += product();
            else if (eat('-')) v -= product();
            else return v;
        }
    }
    Rational product() {
        Rational v = unary();
        for (;;) {
            if (eat('*')) {
                v *= unary();
            } else if (eat('/')) {
                const Rational d = unary();
                if (d == 0) fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }
    Rational unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    Rational power() {
        Rational base = primary();
        if (!eat('^')) return base;
        const Rational e = unary();
        if (e.get_den() != 1 || e < 0 || e > 64) fail("exponent must be an integer in [0,64]");
        Rational r = 1;
        for (long k = e.get_num().get_si(); k > 0; --k) r *= base;
        return r;
    }
    Rational primary() {
        skip();
        if (eat('(')) {
            Rational v = sum();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (i_ < s_.size() && s_[i_] == 'm') {
            ++i_;
            return m_;
        }
        const std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail(i_ < s_.size() ? "unexpected '" + std::string(1, s_[i_]) + "'" : "unexpected end");
        return Rational(Integer(s_.substr(start, i_ - start), 10));
    }

    const std::string& s_;
    long m_;
    std::size_t i_ = 0;
};

const std::set<std::string> kRecordKeys = {"name", "family", "table", "groups", "d1", "d2",
                                           "params", "A", "expected", "notes"};
const std::set<std::string> kGeneratorKeys = {"name",   "family", "table",   "groups", "d1",
                                              "d2",     "params", "A",       "m_range", "regimes",
                                              "notes"};

std::string where(const std::string& ctx, const std::string& key) { return ctx + ": field '" + key + "'"; }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
    if (!j.is_object()) throw CatalogError(ctx + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw CatalogError(ctx + ": unknown field '" + it.key() + "'");
}

const json& field(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw CatalogError(where(ctx, key) + " is missing");
    return j.at(key);
}

std::string str_field(const json& j, const char* key, const std::string& ctx) {
    const json& v = field(j, key, ctx);
    if (!v.is_string()) throw CatalogError(where(ctx, key) + " must be a string");
    return v.get<std::string>();
}

int int_field(const json& j, const char* key, const std::string& ctx) {
    const json& v = field(j, key, ctx);
    if (!v.is_number_integer()) throw CatalogError(where(ctx, key) + " must be an integer");
    return v.get<int>();
}

Rational rational_value(const json& v, const std::string& ctx) {
    if (!v.is_string()) throw CatalogError(ctx + " must be a \"p/q\" string");
    try {
        return parse_rational(v.get<std::string>());
    } catch (const ParseError& e) {
        throw CatalogError(ctx + ": " + e.what());
    }
}

Groups parse_groups(const json& j, const std::string& ctx) {
    const json& g = field(j, "groups", ctx);
    check_keys(g, {"K", "H", "G"}, ctx + ".groups");
    return {str_field(g, "K", ctx + ".groups"), str_field(g, "H", ctx + ".groups"),
            str_field(g, "G", ctx + ".groups")};
}

// Fills A from params and/or the printed value, then validates the triple.
void finish(OrbitRecord& r, const std::string& ctx) {
    try {
        StructuralTriple{r.d1, r.d2, 0}.validate();
        const std::optional<Rational> f = formula_A(r.family, r.params, r.d1, r.d2);
        if (f) r.A = *f;
        else if (r.printed_A) r.A = *r.printed_A;
        else throw CatalogError(ctx + ": no A and no parameters to compute it from");
        r.triple().validate();
    } catch (const CatalogError&) {
        throw;
    } catch (const std::exception& e) {
        throw CatalogError(ctx + ": " + e.what());
    }
}

std::optional<VerdictTag> expected_tag(const json& j, const std::string& ctx) {
    if (!j.contains("expected")) return std::nullopt;
    try {
        return verdict_from_string(str_field(j, "expected", ctx));
    } catch (const std::invalid_argument& e) {
        throw CatalogError(ctx + ": " + e.what());
    }
}

OrbitRecord parse_record(const json& j, const std::string& ctx) {
    check_keys(j, kRecordKeys, ctx);
    OrbitRecord r;
    r.name = str_field(j, "name", ctx);
    const std::string c = ctx + " '" + r.name + "'";
    r.family = family_from_string(str_field(j, "family", c));
    r.groups = parse_groups(j, c);
    r.d1 = int_field(j, "d1", c);
    r.d2 = int_field(j, "d2", c);
    if (j.contains("params")) {
        const json& p = j.at("params");
        if (!p.is_object()) throw CatalogError(where(c, "params") + " must be an object");
        for (auto it = p.begin(); it != p.end(); ++it)
            r.params[it.key()] = rational_value(it.value(), where(c, "params." + it.key()));
    }
    if (j.contains("A")) r.printed_A = rational_value(j.at("A"), where(c, "A"));
    r.expected = expected_tag(j, c);
    r.table = j.contains("table") ? str_field(j, "table", c) : std::string("misc");
    finish(r, c);
    return r;
}

std::pair<long, long> range_field(const json& j, const char* key, const std::string& ctx) {
    const json& v = field(j, key, ctx);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw CatalogError(where(ctx, key) + " must be [lo, hi] integers");
    const long lo = v[0].get<long>(), hi = v[1].get<long>();
    if (lo < 1 || hi < lo) throw CatalogError(where(ctx, key) + " must satisfy 1 <= lo <= hi");
    return {lo, hi};
}

int int_expr(const json& j, const char* key, long m, const std::string& ctx) {
    const Rational v = eval_m_expression(str_field(j, key, ctx), m);
    if (v.get_den() != 1 || !v.get_num().fits_sint_p())
        throw CatalogError(where(ctx, key) + " is not an integer at m = " + std::to_string(m));
    return static_cast<int>(v.get_num().get_si());
}

std::vector<OrbitRecord> expand_generator(const json& j, const std::string& ctx) {
    check_keys(j, kGeneratorKeys, ctx);
    const std::string name = str_field(j, "name", ctx);
    const std::string c = ctx + " '" + name + "'";
    const Family fam = family_from_string(str_field(j, "family", c));
    const Groups groups = parse_groups(j, c);
    const auto [lo, hi] = range_field(j, "m_range", c);
    const json params = j.contains("params") ? j.at("params") : json::object();
    if (!params.is_object()) throw CatalogError(where(c, "params") + " must be an object");

    struct Regime {
        long lo, hi;
        VerdictTag tag;
    };
    std::vector<Regime> regimes;
    if (j.contains("regimes")) {
        if (!j.at("regimes").is_array()) throw CatalogError(where(c, "regimes") + " must be an array");
        for (const json& rg : j.at("regimes")) {
            check_keys(rg, {"m", "expected", "notes"}, c + ".regimes");
            const auto [a, b] = range_field(rg, "m", c + ".regimes");
            const auto tag = expected_tag(rg, c + ".regimes");
            if (!tag) throw CatalogError(c + ".regimes: field 'expected' is missing");
            regimes.push_back({a, b, *tag});
        }
    }
    const std::string table = j.contains("table") ? str_field(j, "table", c) : std::string("misc");

    std::vector<OrbitRecord> out;
    for (long m = lo; m <= hi; ++m) {
        OrbitRecord r;
        r.name = name;
        for (std::size_t p; (p = r.name.find("{m}")) != std::string::npos;)
            r.name.replace(p, 3, std::to_string(m));
        r.family = fam;
        r.groups = groups;
        r.d1 = int_expr(j, "d1", m, c);
        r.d2 = int_expr(j, "d2", m, c);
        for (auto it = params.begin(); it != params.end(); ++it) {
            if (!it.value().is_string())
                throw CatalogError(where(c, "params." + it.key()) + " must be an expression string");
            r.params[it.key()] = eval_m_expression(it.value().get<std::string>(), m);
        }
        if (j.contains("A")) r.printed_A = eval_m_expression(str_field(j, "A", c), m);
        for (const Regime& rg : regimes)
            if (m >= rg.lo && m <= rg.hi) r.expected = rg.tag;
        r.table = table;
        r.generator = name;
        r.m = m;
        finish(r, c + " at m = " + std::to_string(m));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

Rational eval_m_expression(const std::string& expr, long m) { return ExprParser(expr, m).run(); }

std::vector<OrbitRecord> parse_catalog(const json& doc) {
    if (!doc.is_object()) throw CatalogError("catalog: top level must be an object");
    check_keys(doc, {"version", "records", "generators", "notes"}, "catalog");
    if (int_field(doc, "version", "catalog") != 1) throw CatalogError("catalog: unsupported version");
    std::vector<OrbitRecord> out;
    if (doc.contains("records")) {
        const json& rs = doc.at("records");
        if (!rs.is_array()) throw CatalogError("catalog: 'records' must be an array");
        for (std::size_t i = 0; i < rs.size(); ++i)
            out.push_back(parse_record(rs[i], "record " + std::to_string(i)));
    }
    if (doc.contains("generators")) {
        const json& gs = doc.at("generators");
        if (!gs.is_array()) throw CatalogError("catalog: 'generators' must be an array");
        for (std::size_t i = 0; i < gs.size(); ++i) {
            auto more = expand_generator(gs[i], "generator " + std::to_string(i));
            out.insert(out.end(), more.begin(), more.end());
        }
    }
    if (out.empty()) throw CatalogError("catalog: no records");
    std::set<std::string> seen;
    for (const auto& r : out)
        if (!seen.insert(r.name).second) throw CatalogError("catalog: duplicate record name '" + r.name + "'");
    return out;
}

std::vector<OrbitRecord> load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot open catalog '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw CatalogError("catalog '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_catalog(doc);
}

std::string default_catalog_path() {
    if (const char* env = std::getenv("EINCOH_CATALOG"); env && *env) return env;
    return EINCOH_DEFAULT_CATALOG;
}

std::vector<OrbitRecord> builtin_catalog() { return load_catalog(default_catalog_path()); }

std::vector<CheckResult> check_catalog(const std::vector<OrbitRecord>& records) {
    std::vector<std::future<CheckResult>> jobs;
    jobs.reserve(records.size());
    for (const OrbitRecord& r : records) {
        jobs.push_back(std::async(std::launch::async, [&r] {
            CheckResult c;
            c.name = r.name;
            c.triple = r.triple();
            c.A_matches = !r.printed_A || *r.printed_A == r.A;
            c.verdict = classify(c.triple).tag;
            c.verdict_matches = !r.expected || *r.expected == c.verdict;
            return c;
        }));
    }
    std::vector<CheckResult> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

std::map<std::string, std::string> render_tables(const std::vector<OrbitRecord>& records) {
    std::map<std::string, std::vector<std::vector<std::string>>> rows;
    const std::vector<std::string> header = {"name", "K", "H", "G", "d1", "d2", "params", "A",
                                             "A~", "Psi", "chi~", "verdict", "expected"};
    for (const OrbitRecord& r : records) {
        std::string params;
        for (const auto& [k, v] : r.params) params += (params.empty() ? "" : " ") + k + "=" + to_string(v);
        std::ostringstream approx;
        approx << std::setprecision(4) << std::fixed << r.A.get_d();
        const std::string chi = (r.d1 == 2 || r.d1 == 3) ? to_string(chi_tilde(r.d1, r.d2)) : "-";
        rows[r.table].push_back({r.name, r.groups.K, r.groups.H, r.groups.G, std::to_string(r.d1),
                                 std::to_string(r.d2), params.empty() ? "-" : params, to_string(r.A),
                                 approx.str(), to_string(psi(r.d1, r.d2)), chi,
                                 to_string(classify(r.triple()).tag),
                                 r.expected ? to_string(*r.expected) : "-"});
    }
    std::map<std::string, std::string> out;
    for (auto& [label, body] : rows) {
        std::vector<std::size_t> w(header.size());
        for (std::size_t c = 0; c < header.size(); ++c) {
            w[c] = header[c].size();
            for (const auto& row : body) w[c] = std::max(w[c], row[c].size());
        }
        std::ostringstream os;
        auto line = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                os << std::left << std::setw(static_cast<int>(w[c])) << row[c];
                os << (c + 1 < row.size() ? "  " : "");
            }
            os << "\n";
        };
        os << "# " << label << "\n";
        line(header);
        for (const auto& row : body) line(row);
        out[label] = os.str();
    }
    return out;
}

}  // namespace eincoh
