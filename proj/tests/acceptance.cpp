// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "eincoh/catalog.hpp"
#include "eincoh/reconstruct.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace eincoh;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> failures;
    std::ostringstream detail;

    void fail(const std::string& what) {
        pass = false;
        failures.push_back(what);
    }
};

StructuralTriple tri(int d1, int d2, long p, long q = 1) { return {d1, d2, make_q(p, q)}; }

PolyQ desc(std::initializer_list<long> c) {
    std::vector<Rational> v;
    for (long x : c) v.emplace_back(x);
    return PolyQ::from_descending(v);
}

double sup(const State& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------------------

void exact_psi(Outcome& o) {
    struct Row {
        int d1, d2;
        const char* value;
    };
    const Row rows[] = {{5, 8, "186494/198025"},
                        {7, 8, "8879/20886"},
                        {7, 14, "11/6"},
                        {11, 64, "26823819708/1214772845"},
                        {15, 128, "28882022881/576131150"}};
    for (const Row& r : rows) {
        const Rational got = psi(r.d1, r.d2);
        if (got != Rational(r.value))
            o.fail("psi(" + std::to_string(r.d1) + "," + std::to_string(r.d2) + ") = " + got.get_str());
    }
    if (o.pass) o.detail << "5/5 fractions exact";
}

// Theta scaled by (d+8)^4 / (d^2 (d-1)^4) at the comparison value of A, as
// polynomials in d for each coefficient of k.
void printed_polynomials(Outcome& o) {
    const PolyQ theta33 = desc({166941, 535086, 635688, 379080, 166212, 52488});
    if (build_families(3, 3).Theta(make_q(1, 8)) != theta33) o.fail("Theta_{3,3}(1/8)");

    using Coeffs = std::vector<std::vector<long>>;  // k^5 .. k^0, each descending in d
    const Coeffs two = {{35, 324, -10688, 81664, -95232, -28672, 0, 0, 0},
                        {324, 5568, -96000, 516096, -503808, -196608, 0, 0},
                        {1056, 28032, -336384, 1253376, -933888, -393216, 0},
                        {1472, 65280, -536576, 1392640, -589824, -262144},
                        {768, 76800, -319488, 589824, 0},
                        {36864, 0, 0}};
    const Coeffs three = {{119, 1114, -23088, 228448, -76864, -6528, 0, 0, 0},
                          {1710, 27684, -268128, 2570688, -766080, -71424, 0, 0},
                          {8748, 201096, -1273536, 11664000, -2979072, -235008, 0},
                          {19224, 642384, -3037824, 26742528, -5239296, -248832},
                          {15552, 964224, -3359232, 31477248, -3483648},
                          {559872, -1119744, 15676416}};
    const Coeffs three_up = {{119, -182, -71400, 411472, -538384, -197472, 0, 0, 0},
                             {1710, 14724, -992592, 4278816, -4698144, -2160576, 0, 0},
                             {8748, 163512, -5490720, 17221248, -14845248, -7108992, 0},
                             {19224, 657936, -14904000, 32932224, -18893952, -7527168},
                             {15552, 1197504, -19362240, 28771200, -6842880},
                             {839808, -9237888, 8398080}};
    const std::vector<std::vector<long>> explicit_rows = {
        {-527170816000, 601002777600, 336284904960, 60342043392, 4892037120, 159563520},
        {-376619930127, 1076521879818, 503030767428, 82561675464, 6173257536, 184757760},
        {-26716428288, 1770570565632, 724324322304, 110017087488, 7648971264, 211631616}};

    auto expected = [](const Coeffs& c, long d) {
        std::vector<Rational> v;
        for (const auto& row : c) {
            std::vector<Rational> r;
            for (long x : row) r.emplace_back(x);
            v.push_back(PolyQ::from_descending(r).eval(Rational(d)));
        }
        return PolyQ::from_descending(v);
    };

    int checked = 1;
    for (long d = 20; d <= 22; ++d) {
        const Rational scale = make_q((d + 8) * (d + 8), d * (d - 1) * (d - 1));
        const Rational s2 = scale * scale;
        const Rational chi2 = chi_tilde(2, static_cast<int>(d));
        const Rational chi3 = chi_tilde(3, static_cast<int>(d));
        if (chi2 != make_q(4 * d * (d - 1) * (d - 1), (d + 8) * (d + 8)))
            o.fail("chi_tilde(2," + std::to_string(d) + ")");
        if (chi3 != make_q(3 * d * (d - 1) * (d - 1), 2 * (d + 8) * (d + 8)))
            o.fail("chi_tilde(3," + std::to_string(d) + ")");

        const PolyQ t2 = PolyQ(s2) * build_families(2, static_cast<int>(d)).Theta(chi2);
        const PolyQ t3 = PolyQ(s2) * build_families(3, static_cast<int>(d)).Theta(chi3);
        const PolyQ t3_base =
            PolyQ(s2) * build_families(3, static_cast<int>(d)).Theta(make_q(d * (d - 1) * (d - 1), (d + 8) * (d + 8)));
        if (t2 != expected(two, d)) o.fail("Theta_{2," + std::to_string(d) + "}");
        if (t3_base != expected(three, d)) o.fail("Theta_{3," + std::to_string(d) + "} at base value");
        if (t3 != expected(three_up, d)) o.fail("Theta_{3," + std::to_string(d) + "} at chi_tilde");

        std::vector<Rational> v;
        for (long x : explicit_rows[d - 20]) v.emplace_back(x);
        if (t3 != PolyQ::from_descending(v)) o.fail("printed integers at d2=" + std::to_string(d));
        checked += 4;
    }
    if (o.pass) o.detail << checked << " polynomials equal coefficient by coefficient";
}

void surd_threshold(Outcome& o) {
    const QuadraticSurd a = a1_threshold(3, 3);
    if (a != QuadraticSurd(make_q(364, 513), make_q(-112, 1539), 63)) o.fail("exact form differs");
    const double v = a.to_double();
    if (std::abs(v - 0.1319) >= 5e-4) o.fail("binary64 value off");
    o.detail << "value " << v;
}

void catalog_check(Outcome& o) {
    const std::vector<OrbitRecord> recs = builtin_catalog();
    const std::vector<CheckResult> res = check_catalog(recs);
    int printed = 0, verdicts = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const OrbitRecord& r = recs[i];
        if (r.printed_A) {
            ++printed;
            if (!res[i].A_matches) o.fail("A of " + r.name);
        }
        std::optional<VerdictTag> want;
        if (r.table == "table1") want = VerdictTag::Existence;
        if (r.table == "table2") want = VerdictTag::NonexistenceTwoSummands;
        if (r.table == "table3") want = VerdictTag::Indeterminable;
        if (r.table == "remark") want = VerdictTag::NonexistenceBohm;
        if (want) {
            ++verdicts;
            if (res[i].verdict != *want) o.fail(r.name + " -> " + to_string(res[i].verdict));
        }
    }

    struct Direct {
        StructuralTriple t;
        VerdictTag want;
        const char* label;
    };
    const Direct direct[] = {
        {tri(3, 3, 1, 8), VerdictTag::Existence, "(3,3,1/8)"},
        {tri(7, 7, 3, 8), VerdictTag::NonexistenceTwoSummands, "(7,7,3/8)"},
        {tri(8, 16, 25, 9), VerdictTag::NonexistenceTwoSummands, "(8,16,25/9)"},
        // Sp(m+2) generalized Wallach: d = (4, 8m), A = m/2 (8m-1)^2/(m+3)^2
        {tri(4, 40, 5 * 39 * 39, 2 * 64), VerdictTag::Indeterminable, "Sp m=5"},
        {tri(4, 216, 27 * 215 * 215, 2 * 900), VerdictTag::Existence, "Sp m=27"},
    };
    for (const Direct& d : direct) {
        ++verdicts;
        const VerdictTag got = classify(d.t).tag;
        if (got != d.want) o.fail(std::string(d.label) + " -> " + to_string(got));
    }
    // the generated Sp records must be the same triples
    for (const OrbitRecord& r : recs) {
        if (!r.generator || r.family != Family::GeneralizedWallach || r.d1 != 4 || !r.m) continue;
        if (*r.m == 5 && r.A != direct[3].t.A) o.fail("catalog Sp m=5 triple");
        if (*r.m == 27 && r.A != direct[4].t.A) o.fail("catalog Sp m=27 triple");
    }
    if (o.pass)
        o.detail << recs.size() << " records, " << printed << " printed A exact, " << verdicts
                 << " verdicts reproduced";
}

void resultant_suite(Outcome& o) {
    const Rational As[] = {make_q(1, 8), make_q(1, 2), Rational(3)};
    int n_ids = 0;
    for (int d1 = 2; d1 <= 8; ++d1)
        for (int d2 = d1; d2 <= 8; ++d2) {
            const PolynomialFamilySet f = build_families(d1, d2);
            const Rational D1(d1), D2(d2), N1(d1 + d2 - 1);
            for (const Rational& A : As) {
                const PolyQ lhs_p = sylvester_resultant_in_l(f.omega(A), f.P_Y(A));
                const Rational c_p = (D1 - 1) * A / (D1 * D1 * D2 * D2 * N1 * N1);
                const PolyQ rhs_p = f.P_X * f.P_X * PolyQ(c_p) * (f.rho1 * PolyQ(A) - f.rho0);

                const PolyQ lhs_z = sylvester_resultant_in_l(f.omega(A), f.zeta(A));
                Rational den = D2 * D2 * D2 * (D2 - 1) * (D2 - 1) * N1 * N1;
                for (int i = 0; i < 6; ++i) den *= D1;
                const PolyQ k = PolyQ::k();
                const PolyQ rhs_z = PolyQ(-(D1 - 1) * A / den) * PolyQ{Rational(2 * d1), D2} *
                                    pow(PolyQ{1, -1}, 2) * k * k * f.beta3 * f.beta3 * f.Theta(A);
                const std::string at = "(" + std::to_string(d1) + "," + std::to_string(d2) + "," + A.get_str() + ")";
                if (lhs_p != rhs_p) o.fail("Res(omega,P_Y) at " + at);
                if (lhs_z != rhs_z) o.fail("Res(omega,zeta) at " + at);
                n_ids += 2;
            }
        }
    if (o.pass) o.detail << n_ids << " identities exact";
}

void positivity_suite(Outcome& o) {
    int n_claims = 0;
    for (int d1 = 2; d1 <= 10; ++d1)
        for (int d2 = d1; d2 <= 10; ++d2) {
            const PolynomialFamilySet f = build_families(d1, d2);
            const Rational lo = make_q(-d1, d2);
            const Rational n_d1(d1 + d2 + d1);
            const std::string at = "(" + std::to_string(d1) + "," + std::to_string(d2) + ")";
            auto want = [&](const PolyQ& p, const Rational& a, const Rational& b, EndFlags e, SignTag s,
                            const char* what) {
                ++n_claims;
                if (sign_on_interval(p, a, b, e).tag != s) o.fail(std::string(what) + " at " + at);
            };
            want(f.beta0, 0, 1, kClosed, SignTag::StrictlyPositive, "beta0");
            want(f.beta1, 0, 1, kClosed, SignTag::StrictlyPositive, "beta1");
            want(f.beta2, 0, 1, kClosed, SignTag::StrictlyPositive, "beta2");
            want(f.omega2, lo, 1, kClosed, SignTag::StrictlyNegative, "omega2");
            want(f.omega0, lo, 1, kClosed, SignTag::StrictlyPositive, "omega0");
            want(f.P_X + f.Q_X, lo, 1, kClosed, SignTag::StrictlyNegative, "P_X+Q_X");
            // beta0/beta1 >= 1/(n+d1) on [0,1] with equality at k = 1
            ++n_claims;
            if (f.beta0.eval(Rational(1)) * n_d1 != f.beta1.eval(Rational(1))) o.fail("beta0/beta1 at k=1, " + at);
            // for d1 = d2 = 2 the ratio is constant and the difference vanishes identically
            ++n_claims;
            const SignTag gap = sign_on_interval(PolyQ(n_d1) * f.beta0 - f.beta1, 0, 1, EndFlags{false, true}).tag;
            if (gap != SignTag::StrictlyPositive && gap != SignTag::ZeroPolynomial)
                o.fail("beta0/beta1 minimum at " + at);
        }
    if (o.pass) o.detail << n_claims << " claims certified over 45 pairs";
}

// Random interior point of the conservation surface.
State random_interior(const Model& m, std::mt19937& g) {
    std::uniform_real_distribution<double> u(-0.15, 0.15), p(0.05, 0.4);
    for (;;) {
        State x{u(g), u(g), p(g), p(g)};
        x = project_Y(x, m);
        const double H = derived(x, m).H;
        if (x[2] > 0 && H * H < 0.8 && std::abs(conservation_residual(x, m)) < 1e-15) return x;
    }
}

void dynamics_suite(Outcome& o) {
    std::mt19937 g(11);
    double drift = 0, phi = 0, z2 = 0, field = 0, eig = 0;
    for (const StructuralTriple& t : {tri(2, 4, 1), tri(3, 8, 1), tri(3, 6, 25, 16)}) {
        const Model m(t);
        IntegratorControls c;
        c.rtol = 1e-10;
        c.atol = 1e-12;
        c.horizon = 40;
        c.sample_step = 0.05;

        drift = std::max(drift, integrate(random_interior(m, g), m, c).max_drift);
        drift = std::max(drift, integrate(gamma_init(m, 1, 1e-6), m, c).max_drift);

        // Default tolerances here: at rtol 1e-10 the (3,6,25/16) run picks up a
        // rounding offset from the line near eta = 20, which the flow then
        // amplifies by about e^0.9 per unit of eta.
        IntegratorControls line;
        line.horizon = 40;
        line.sample_step = 0.05;
        const CriticalPointSet cp = critical_points(t);
        for (double x : {0.0, 0.5 / t.n()}) {
            for (const Sample& s : integrate(on_ratio_line(m, cp.mu2, x), m, line).samples)
                phi = std::max({phi, std::abs(s.state[0] - s.state[1]), std::abs(s.state[3] - cp.mu2 * s.state[2])});
        }

        IntegratorControls f = c, b = c;
        f.horizon = b.horizon = 10;
        b.direction = -1;
        const State x0 = random_interior(m, g);
        const TrajectoryRecord fw = integrate(x0, m, f);
        const TrajectoryRecord bw = integrate(reflect(x0), m, b);
        if (fw.samples.size() != bw.samples.size()) {
            o.fail("reflected run sampled differently");
        } else {
            for (std::size_t i = 0; i < fw.samples.size(); ++i)
                z2 = std::max(z2, distance(reflect(bw.samples[bw.samples.size() - 1 - i].state), fw.samples[i].state));
        }

        for (const State& p : {cp.p0_plus, cp.p0_minus, *cp.p2_plus})
            field = std::max(field, sup(vector_field(p, m)));

        const auto J = jacobian_fd(cp.p0_plus, m);
        const double scale = sup(cp.v1);
        for (int i = 0; i < 4; ++i) {
            double Jv = 0;
            for (int j = 0; j < 4; ++j) Jv += J[i][j] * cp.v1[j];
            eig = std::max(eig, std::abs(Jv - 2.0 / t.d1 * cp.v1[i]) / scale);
        }
    }
    if (drift >= 1e-9) o.fail("conservation drift");
    if (phi >= 1e-8) o.fail("ratio line drift");
    if (z2 >= 1e-9) o.fail("reflection");
    if (field >= 1e-12) o.fail("field at equilibria");
    if (eig >= 1e-6) o.fail("unstable eigenvalue");
    o.detail << "drift " << drift << ", ratio line " << phi << ", reflection " << z2
             << ", field " << field << ", eigen " << eig;
}

void heteroclines(Outcome& o) {
    for (const StructuralTriple& t : {tri(2, 4, 1), tri(3, 8, 1)}) {
        const std::string at = "(" + std::to_string(t.d1) + "," + std::to_string(t.d2) + ",1)";
        const ShootingResult r = shoot(t);
        const MetricProfile p = reconstruct_profile(r.trajectory, t);
        const double res = einstein_residual(p, t);
        if (!r.certified) o.fail(at + " not certified");
        if (std::abs(r.objective_at_root) >= 1e-9) o.fail(at + " X1 at H=0");
        if (res >= 1e-5) o.fail(at + " residual");
        for (const ProfileSample& e : {p.start, p.end}) {
            if (std::abs(e.f1) >= 1e-4) o.fail(at + " f1 at an end");
            if (std::abs(std::abs(e.f1dot) - 1) >= 1e-3) o.fail(at + " |f1dot| at an end");
        }
        o.detail << at << " s*=" << r.s_star << " residual " << res << "; ";
    }
    for (const StructuralTriple& t : {tri(7, 8, 1, 2), tri(3, 6, 25, 16)}) {
        bool certified = false;
        try {
            certified = shoot(t).certified;
        } catch (const NoSignChange&) {
        }
        if (certified) o.fail("negative control (" + std::to_string(t.d1) + "," + std::to_string(t.d2) + ") certified");
    }
    if (o.pass) o.detail << "controls not certified";
}

void theta_sanity(Outcome& o) {
    const ThetaIVPResult e = theta_ivp({2, 4, bohm_lower(2, 4)});
    if (e.c != 0.0) o.fail("c at the Bohm boundary");
    if (!e.theta_limit || *e.theta_limit != 0.0) o.fail("limit at the Bohm boundary");

    const StructuralTriple t = tri(2, 4, 1);
    ThetaIVPResult r;
    const Verdict v = numeric_second(t, classify(t), &r);
    if (!r.theta_limit) {
        o.fail("(2,4,1) limit did not settle");
        return;
    }
    const bool below = *r.theta_limit < 0.75 * M_PI;
    if (below != (v.tag == VerdictTag::TwoMetricsNumeric)) o.fail("upgrade disagrees with the limit");
    // pinned: 2.0344439 < 3 pi / 4, so the upgrade fires
    if (std::abs(*r.theta_limit - 2.034443935885) > 1e-6) o.fail("pinned limit moved");
    if (!below) o.fail("pinned upgrade no longer fires");
    o.detail << "limit " << *r.theta_limit << ", verdict " << to_string(v.tag);
}

void sine_cone(Outcome& o) {
    const StructuralTriple t = tri(2, 4, 1);
    const double d1 = t.d1, d2 = t.d2, n = t.n(), A = to_double(t.A);
    const MetricProfile p = reconstruct_profile(ratio_line_trajectory(t), t);
    const double Lambda = p.Lambda;
    const double disc = (d2 - 1) * (d2 - 1) - 4 * (d1 - 1) * (n + d1) * A / d2;
    const double mu2 = ((d2 - 1) - std::sqrt(disc)) / (2 * (n + d1) * A / d2);
    const double c2sq = ((d1 - 1) / mu2 + A * mu2) * n / ((n - 1) * Lambda);
    const double c1 = std::sqrt(mu2 * c2sq), c2 = std::sqrt(c2sq), w = std::sqrt(Lambda / n);
    double err = 0;
    for (const ProfileSample& s : p.samples) {
        err = std::max(err, std::abs(s.f1 - c1 * std::sin(w * s.t)));
        err = std::max(err, std::abs(s.f2 - c2 * std::sin(w * s.t)));
        err = std::max(err, std::abs(s.f1dot - c1 * w * std::cos(w * s.t)));
        err = std::max(err, std::abs(s.f2dot - c2 * w * std::cos(w * s.t)));
    }
    if (!(err < 1e-6)) o.fail("sup error");
    o.detail << "sup error " << err << " over " << p.samples.size() << " samples";
}

}  // namespace

int main() {
    struct Criterion {
        const char* title;
        double budget_s;  // 0: no time limit
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> all = {
        {"exact Psi", 1, exact_psi},
        {"printed Theta polynomials", 0, printed_polynomials},
        {"surd threshold", 0, surd_threshold},
        {"catalog check", 30, catalog_check},
        {"resultant identities", 0, resultant_suite},
        {"positivity suite", 0, positivity_suite},
        {"dynamics properties", 60, dynamics_suite},
        {"heterocline construction", 300, heteroclines},
        {"theta IVP", 0, theta_sanity},
        {"sine cone", 0, sine_cone},
    };
    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            all[i].run(o);
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (all[i].budget_s > 0 && secs >= all[i].budget_s) {
            std::ostringstream w;
            w << "took " << secs << " s, budget " << all[i].budget_s << " s";
            o.fail(w.str());
        }
        failed += !o.pass;
        std::string text;
        for (const std::string& f : o.failures) text += f + "; ";
        text += o.detail.str();
        std::printf("criterion %zu: %s %s (%.2f s): %s\n", i + 1, o.pass ? "PASS" : "FAIL", all[i].title, secs,
                    text.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
