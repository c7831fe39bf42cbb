#include "eincoh/catalog.hpp"
#include "eincoh/reconstruct.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace eincoh;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 2, kIndeterminable = 3, kNotCertified = 4, kNumeric = 5 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TripleArgs {
    int d1 = 0, d2 = 0;
    std::string A;
};

struct NumericArgs {
    double rtol = 1e-11, atol = 1e-13, eps = 1e-6, horizon = 400;
    double drift_tol = 1e-8, endpoint_tol = 1e-6, sample_step = 5e-3;
    double lambda = 0;
};

void add_triple(CLI::App* cmd, TripleArgs& t) {
    cmd->add_option("--d1", t.d1, "dimension of the collapsing sphere factor")->required();
    cmd->add_option("--d2", t.d2, "dimension of the base summand")->required();
    cmd->add_option("--A", t.A, "structural constant as p/q")->required();
}

void add_numeric(CLI::App* cmd, NumericArgs& a, bool lambda) {
    cmd->add_option("--rtol", a.rtol, "relative tolerance")->check(CLI::Range(1e-13, 1.0))->capture_default_str();
    cmd->add_option("--atol", a.atol, "absolute tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--eps", a.eps, "offset of the initial point along the unstable manifold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--horizon", a.horizon, "eta horizon per integration")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--drift-tol", a.drift_tol, "conservation drift that aborts a run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--endpoint-tol", a.endpoint_tol, "distance to p0- that counts as arrival")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--sample-step", a.sample_step, "eta spacing of recorded samples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    if (lambda)
        cmd->add_option("--lambda", a.lambda, "Einstein constant of the profile (default n-1)")
            ->check(CLI::PositiveNumber);
}

// Verdicts are exact claims, so classification refuses decimals.
StructuralTriple exact_triple(const TripleArgs& a) {
    StructuralTriple t;
    t.d1 = a.d1;
    t.d2 = a.d2;
    try {
        t.A = parse_rational(a.A);
    } catch (const ParseError& e) {
        throw UsageError(std::string(e.what()) + " (exact p/q required here)");
    }
    t.validate();
    return t;
}

StructuralTriple numeric_triple(const TripleArgs& a) {
    StructuralTriple t;
    t.d1 = a.d1;
    t.d2 = a.d2;
    bool decimal = false;
    try {
        t.A = parse_rational_or_decimal(a.A, &decimal);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
    if (decimal)
        std::cerr << "warning: decimal A=" << a.A << " read as the exact rational " << to_string(t.A)
                  << "; verdict-level exactness is not implied\n";
    t.validate();
    return t;
}

ojson triple_json(const StructuralTriple& t) {
    return ojson{{"d1", t.d1}, {"d2", t.d2}, {"A", to_string(t.A)}};
}

ojson config_json(const NumericArgs& a, const StructuralTriple& t) {
    return ojson{{"rtol", a.rtol},
                 {"atol", a.atol},
                 {"eps", a.eps},
                 {"horizon", a.horizon},
                 {"drift_tol", a.drift_tol},
                 {"endpoint_tol", a.endpoint_tol},
                 {"sample_step", a.sample_step},
                 {"Lambda", a.lambda > 0 ? a.lambda : t.n() - 1.0}};
}

ShootControls shoot_controls(const NumericArgs& a) {
    ShootControls c;
    c.ode.rtol = a.rtol;
    c.ode.atol = a.atol;
    c.ode.horizon = a.horizon;
    c.ode.drift_tol = a.drift_tol;
    c.ode.endpoint_tol = a.endpoint_tol;
    c.ode.sample_step = a.sample_step;
    c.eps = a.eps;
    return c;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << body;
}

void print_kv(const ojson& j, const std::string& indent = "") {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_object()) {
            std::cout << indent << it.key() << ":\n";
            print_kv(it.value(), indent + "  ");
        } else {
            std::cout << indent << it.key() << ": "
                      << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) << "\n";
        }
    }
}

void emit(const ojson& j, const std::string& format) {
    if (format == "json") std::cout << j.dump(2) << "\n";
    else print_kv(j);
}

void print_verdict(const StructuralTriple& t, const Verdict& v, const std::string& format) {
    if (format == "json") {
        ojson j{{"triple", triple_json(t)}};
        j["verdict"] = to_json(v);
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::cout << "triple: (" << t.d1 << ", " << t.d2 << ", " << to_string(t.A) << ")\n";
    std::cout << "verdict: " << to_string(v.tag) << "\n";
    for (const Evidence& e : v.evidence)
        std::cout << "  [" << (e.holds ? "yes" : "no ") << "] " << e.predicate << ": " << e.value << "\n";
}

int cmd_classify(const TripleArgs& a, bool numeric, const std::string& format) {
    const StructuralTriple t = exact_triple(a);
    Verdict v = classify(t);
    if (numeric) {
        try {
            v = numeric_second(t, v);
        } catch (const ThetaDomainError& e) {
            std::cerr << "warning: numeric second metric skipped: " << e.what() << "\n";
        }
    }
    print_verdict(t, v, format);
    return v.tag == VerdictTag::Indeterminable ? kIndeterminable : kOk;
}

int cmd_thresholds(const TripleArgs& a, const std::string& format) {
    const ThresholdReport r = threshold_report(exact_triple(a));
    if (format == "json") std::cout << to_json(r).dump(2) << "\n";
    else std::cout << to_table(r);
    return kOk;
}

int cmd_theta(const TripleArgs& a, double horizon, const std::string& format) {
    const StructuralTriple t = exact_triple(a);
    ThetaIVPResult r;
    try {
        r = theta_ivp(t, horizon);
    } catch (const ThetaDomainError& e) {
        throw UsageError(e.what());
    }
    ojson j{{"triple", triple_json(t)}, {"horizon", horizon}};
    j["drift_constant"] = r.c;
    j["mu2"] = r.mu2_used;
    j["theta_limit"] = r.theta_limit ? ojson(*r.theta_limit) : ojson(nullptr);
    j["final_theta"] = r.final_theta;
    j["eta_end"] = r.eta_horizon;
    j["below_3pi_over_4"] = r.theta_limit && *r.theta_limit < 0.75 * M_PI;
    emit(j, format);
    return kOk;
}

ojson profile_summary(const MetricProfile& p, const StructuralTriple& t) {
    const ResidualReport res = einstein_residuals(p, t);
    ojson j = profile_metadata(p, res.max);
    j["residual_terms"] = ojson{{"eq1", res.eq1}, {"eq2", res.eq2}, {"trace", res.trace},
                                {"constraint", res.constraint}};
    return j;
}

void warn_if_degenerate(const StructuralTriple& t) {
    const DiscriminantMu dm = discriminant_and_mu(t);
    if (dm.delta == 0)
        std::cerr << "warning: discriminant is zero; the homogeneous Einstein metrics coincide and no "
                     "heterocline is expected\n";
    else if (dm.delta < 0)
        std::cerr << "warning: discriminant is negative; no homogeneous Einstein metric on the "
                     "principal orbit\n";
}

int cmd_shoot(const TripleArgs& a, const NumericArgs& na, const std::string& out, const std::string& profile,
              const std::string& format) {
    const StructuralTriple t = numeric_triple(a);
    warn_if_degenerate(t);
    if (t.A == 0) throw UsageError("A = 0 is the product case; nothing to shoot");
    ojson j{{"triple", triple_json(t)}, {"config", config_json(na, t)}};
    ShootingResult r;
    try {
        r = shoot(t, shoot_controls(na));
    } catch (const NoSignChange& e) {
        j["certified"] = false;
        j["reason"] = e.what();
        emit(j, format);
        return kNotCertified;
    }
    j["s_ref"] = r.s_ref;
    j["s_bullet_defined"] = r.s_bullet_defined;
    j["roots"] = r.roots;
    j["s_star"] = r.s_star;
    j["x1_at_h0"] = r.objective_at_root;
    j["s_star_half_eps"] = r.s_star_half_eps;
    j["richardson_ok"] = r.richardson_ok;
    j["gap_p0_plus"] = r.gap_p0_plus;
    j["gap_p0_minus"] = r.gap_p0_minus;
    j["winding"] = r.trajectory.winding;
    j["max_drift"] = r.trajectory.max_drift;
    j["certified"] = r.certified;
    const Model m(t);
    if (!out.empty()) write_file(out, trajectory_csv(r.trajectory, m));
    if (r.certified) {
        const MetricProfile p = reconstruct_profile(r.trajectory, t, na.lambda);
        j["profile"] = profile_summary(p, t);
        if (!profile.empty()) write_file(profile, profile_csv(p));
    } else if (!profile.empty()) {
        std::cerr << "warning: no profile written; the heterocline is not certified\n";
    }
    emit(j, format);
    return r.certified ? kOk : kNotCertified;
}

TrajectoryRecord read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open trajectory '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("eta,X1,X2,Y,Z", 0) != 0)
        throw UsageError("'" + path + "' is not a trajectory CSV (header eta,X1,X2,Y,Z,...)");
    TrajectoryRecord tr;
    for (int row = 2; std::getline(in, line); ++row) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        double v[5];
        for (double& x : v) {
            if (!std::getline(ss, cell, ',')) throw UsageError(path + ":" + std::to_string(row) + ": short row");
            try {
                x = std::stod(cell);
            } catch (const std::exception&) {
                throw UsageError(path + ":" + std::to_string(row) + ": bad number '" + cell + "'");
            }
        }
        tr.samples.push_back({v[0], {v[1], v[2], v[3], v[4]}});
    }
    return tr;
}

int cmd_reconstruct(const TripleArgs& a, const NumericArgs& na, bool ratio_line, const std::string& from,
                    const std::string& out, const std::string& format) {
    const StructuralTriple t = numeric_triple(a);
    ojson j{{"triple", triple_json(t)}, {"config", config_json(na, t)}};
    TrajectoryRecord tr;
    if (ratio_line) {
        j["source"] = "ratio line";
        tr = ratio_line_trajectory(t, 1e-7, na.sample_step);
    } else if (!from.empty()) {
        j["source"] = from;
        tr = read_trajectory_csv(from);
    } else {
        j["source"] = "shoot";
        warn_if_degenerate(t);
        if (t.A == 0) throw UsageError("A = 0 is the product case; nothing to shoot");
        ShootingResult r;
        try {
            r = shoot(t, shoot_controls(na));
        } catch (const NoSignChange& e) {
            j["certified"] = false;
            j["reason"] = e.what();
            emit(j, format);
            return kNotCertified;
        }
        j["s_star"] = r.s_star;
        j["certified"] = r.certified;
        if (!r.certified) {
            emit(j, format);
            return kNotCertified;
        }
        tr = std::move(r.trajectory);
    }
    const MetricProfile p = reconstruct_profile(tr, t, na.lambda);
    j["profile"] = profile_summary(p, t);
    if (!out.empty()) write_file(out, profile_csv(p));
    emit(j, format);
    return kOk;
}

int cmd_catalog(bool check, bool emit_tables, const std::string& catalog, const std::string& out_dir) {
    if (check == emit_tables) throw UsageError("catalog needs exactly one of --check or --emit-tables");
    std::vector<OrbitRecord> records;
    try {
        records = catalog.empty() ? builtin_catalog() : load_catalog(catalog);
    } catch (const CatalogError& e) {
        throw UsageError(e.what());
    }
    if (emit_tables) {
        std::filesystem::create_directories(out_dir);
        for (const auto& [label, text] : render_tables(records)) {
            const auto path = std::filesystem::path(out_dir) / (label + ".txt");
            write_file(path.string(), text);
            std::cout << "wrote " << path.string() << "\n";
        }
        return kOk;
    }
    int bad = 0;
    for (const CheckResult& c : check_catalog(records)) {
        bad += !c.ok();
        std::cout << (c.ok() ? "ok   " : "FAIL ") << c.name << "  (" << c.triple.d1 << ", " << c.triple.d2
                  << ", " << to_string(c.triple.A) << ")  " << to_string(c.verdict)
                  << (c.A_matches ? "" : "  [A differs from printed value]")
                  << (c.verdict_matches ? "" : "  [verdict differs from expected]") << "\n";
    }
    std::cout << records.size() - bad << "/" << records.size() << " records match\n";
    return bad == 0 ? kOk : kNotCertified;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cohomogeneity one Einstein metrics on two-summand double disk bundles"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "table";
    app.add_option("--format", format, "report format")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    app.footer(
        "Exit codes: 0 ok, 2 usage/input, 3 indeterminable, 4 not certified, 5 numeric failure.\n"
        "EINCOH_CATALOG overrides the catalog path.");

    TripleArgs ta;
    NumericArgs na;

    auto* classify_cmd = app.add_subcommand("classify", "exact existence / non-existence verdict");
    add_triple(classify_cmd, ta);
    bool numeric_second_flag = false;
    classify_cmd->add_flag("--numeric-second", numeric_second_flag,
                           "run the theta IVP and upgrade Existence when it settles below 3pi/4");

    auto* thresholds_cmd = app.add_subcommand("thresholds", "exact threshold report");
    add_triple(thresholds_cmd, ta);

    auto* theta_cmd = app.add_subcommand("theta", "theta initial value problem");
    add_triple(theta_cmd, ta);
    double theta_horizon = 400;
    theta_cmd->add_option("--horizon", theta_horizon, "eta horizon")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* shoot_cmd = app.add_subcommand("shoot", "shoot for a heterocline joining p0+ and p0-");
    add_triple(shoot_cmd, ta);
    add_numeric(shoot_cmd, na, true);
    std::string out_path, profile_path;
    shoot_cmd->add_option("--out", out_path, "trajectory CSV");
    shoot_cmd->add_option("--profile", profile_path, "reconstructed metric profile CSV");

    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "metric profile from a phase trajectory");
    add_triple(reconstruct_cmd, ta);
    add_numeric(reconstruct_cmd, na, true);
    bool ratio_line = false;
    std::string from;
    reconstruct_cmd->add_flag("--ratio-line", ratio_line, "use the invariant curve through the ratio line");
    reconstruct_cmd->add_option("--trajectory", from, "read a trajectory CSV instead of shooting");
    reconstruct_cmd->add_option("--out", out_path, "profile CSV");

    auto* catalog_cmd = app.add_subcommand("catalog", "check or tabulate the orbit catalog");
    bool check = false, emit_tables = false;
    std::string catalog_path, out_dir = "tables";
    catalog_cmd->add_flag("--check", check, "recompute A and verdicts for every record");
    catalog_cmd->add_flag("--emit-tables", emit_tables, "write one text table per catalog table label");
    catalog_cmd->add_option("--catalog", catalog_path, "catalog JSON (default: $EINCOH_CATALOG or shipped)");
    catalog_cmd->add_option("--out-dir", out_dir, "directory for --emit-tables")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*classify_cmd) return cmd_classify(ta, numeric_second_flag, format);
        if (*thresholds_cmd) return cmd_thresholds(ta, format);
        if (*theta_cmd) return cmd_theta(ta, theta_horizon, format);
        if (*shoot_cmd) return cmd_shoot(ta, na, out_path, profile_path, format);
        if (*reconstruct_cmd) return cmd_reconstruct(ta, na, ratio_line, from, out_path, format);
        if (*catalog_cmd) return cmd_catalog(check, emit_tables, catalog_path, out_dir);
    } catch (const DriftError& e) {
        std::cerr << "numeric failure: " << e.what() << " (max drift " << fmt(e.max_drift) << " at eta "
                  << fmt(e.eta) << ")\n";
        return kNumeric;
    } catch (const ReconstructError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
