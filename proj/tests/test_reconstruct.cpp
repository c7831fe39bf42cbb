#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eincoh/reconstruct.hpp"

#include <cmath>
#include <map>

using namespace eincoh;

namespace {

StructuralTriple tri(int d1, int d2, long p, long q = 1) { return {d1, d2, make_q(p, q)}; }

// Cone dt^2 + sin^2(w t) g over the homogeneous Einstein metric g with ratio
// mu2, scaled so the cone has Einstein constant Lambda.
struct SineCone {
    double c1, c2, w;
};

SineCone sine_cone(const StructuralTriple& t, double Lambda) {
    const double d1 = t.d1, d2 = t.d2, n = t.n(), A = to_double(t.A);
    const double disc = (d2 - 1) * (d2 - 1) - 4 * (d1 - 1) * (n + d1) * A / d2;
    const double mu2 = ((d2 - 1) - std::sqrt(disc)) / (2 * (n + d1) * A / d2);
    // Ricci of g must be (n-1) w^2 with w^2 = Lambda / n on both summands.
    const double c2sq = ((d1 - 1) / mu2 + A * mu2) * n / ((n - 1) * Lambda);
    return {std::sqrt(mu2 * c2sq), std::sqrt(c2sq), std::sqrt(Lambda / n)};
}

const ShootingResult& shot(int which) {
    static std::map<int, ShootingResult> cache;
    auto it = cache.find(which);
    if (it == cache.end())
        it = cache.emplace(which, shoot(which == 0 ? tri(2, 4, 1) : tri(3, 8, 1))).first;
    return it->second;
}

}  // namespace

TEST_CASE("sine cone is reproduced from the ratio line") {
    const StructuralTriple t = tri(2, 4, 1);
    const double Lambda = t.n() - 1;
    const SineCone sc = sine_cone(t, Lambda);
    const MetricProfile p = reconstruct_profile(ratio_line_trajectory(t), t);
    CHECK(p.Lambda == Lambda);
    double err = 0;
    for (const auto& s : p.samples) {
        err = std::max(err, std::abs(s.f1 - sc.c1 * std::sin(sc.w * s.t)));
        err = std::max(err, std::abs(s.f2 - sc.c2 * std::sin(sc.w * s.t)));
        err = std::max(err, std::abs(s.f1dot - sc.c1 * sc.w * std::cos(sc.w * s.t)));
        err = std::max(err, std::abs(s.f2dot - sc.c2 * sc.w * std::cos(sc.w * s.t)));
    }
    CHECK(err < 1e-6);
    CHECK(p.t_star == doctest::Approx(M_PI / sc.w).epsilon(1e-6));
    CHECK(std::abs(p.start.f1) < 1e-6);
    CHECK(std::abs(p.end.f2) < 1e-6);
    CHECK(einstein_residual(p, t) < 1e-6);
}

TEST_CASE("heterocline profiles satisfy the Einstein equations and close smoothly") {
    for (int which : {0, 1}) {
        const StructuralTriple t = which == 0 ? tri(2, 4, 1) : tri(3, 8, 1);
        CAPTURE(t.d2);
        const ShootingResult& r = shot(which);
        REQUIRE(r.certified);
        const MetricProfile p = reconstruct_profile(r.trajectory, t);
        const ResidualReport res = einstein_residuals(p, t);
        CHECK(res.max < 1e-5);
        CHECK(res.constraint < 1e-9);
        CHECK(std::abs(p.start.f1) < 1e-4);
        CHECK(std::abs(p.end.f1) < 1e-4);
        CHECK(std::abs(p.start.f1dot - 1) < 1e-4);
        CHECK(std::abs(p.end.f1dot + 1) < 1e-4);
        CHECK(p.start.f2 > 0.1);
        CHECK(p.end.f2 > 0.1);
        CHECK(std::abs(p.start.f2dot) < 1e-3);
        CHECK(std::abs(p.end.f2dot) < 1e-3);
        for (const auto& s : p.samples) {
            CHECK(s.f1 > 0);
            CHECK(s.f2 > 0);
        }
        // mirror symmetry of the profile about t_star / 2
        CHECK(p.start.f2 == doctest::Approx(p.end.f2).epsilon(1e-6));
    }
}

TEST_CASE("round trip back to phase space") {
    const StructuralTriple t = tri(2, 4, 1);
    const Model m(t);
    const TrajectoryRecord& tr = shot(0).trajectory;
    const MetricProfile p = reconstruct_profile(tr, t);
    std::map<double, State> by_eta;
    for (const Sample& s : tr.samples) by_eta[s.eta] = s.state;
    double worst = 0;
    for (const auto& s : p.samples) {
        REQUIRE(by_eta.count(s.eta));
        worst = std::max(worst, distance(to_phase(s, m, p.Lambda), by_eta[s.eta]));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("homothety under Lambda -> 4 Lambda") {
    const StructuralTriple t = tri(2, 4, 1);
    const TrajectoryRecord& tr = shot(0).trajectory;
    const MetricProfile a = reconstruct_profile(tr, t, 5);
    const MetricProfile b = reconstruct_profile(tr, t, 20);
    REQUIRE(a.samples.size() == b.samples.size());
    bool exact = true;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        exact = exact && b.samples[i].t == a.samples[i].t / 2 && b.samples[i].f1 == a.samples[i].f1 / 2 &&
                b.samples[i].f2 == a.samples[i].f2 / 2 && b.samples[i].f1dot == a.samples[i].f1dot &&
                b.samples[i].f2dot == a.samples[i].f2dot;
    }
    CHECK(exact);
    CHECK(b.t_star == a.t_star / 2);
    CHECK(einstein_residual(b, t) < 1e-5);
}

TEST_CASE("residual is sensitive to a perturbed profile") {
    const StructuralTriple t = tri(2, 4, 1);
    MetricProfile p = reconstruct_profile(shot(0).trajectory, t);
    for (auto& s : p.samples) s.f2 += 1e-3;
    CHECK(einstein_residual(p, t) > 1e-3);
}

TEST_CASE("reconstruction errors") {
    const StructuralTriple t = tri(2, 4, 1);
    const Model m(t);
    IntegratorControls c;
    c.horizon = 5;
    const TrajectoryRecord flat = integrate(gamma_init(m, 0, 1e-3), m, c);
    CHECK_THROWS_AS(reconstruct_profile(flat, t), ReconstructError);

    TrajectoryRecord tiny;
    tiny.samples = {shot(0).trajectory.samples.begin(), shot(0).trajectory.samples.begin() + 3};
    CHECK_THROWS_AS(reconstruct_profile(tiny, t), ReconstructError);

    CHECK_THROWS_AS(ratio_line_trajectory(tri(7, 8, 3)), ReconstructError);
}

TEST_CASE("profile csv and metadata") {
    const StructuralTriple t = tri(2, 4, 1);
    const MetricProfile p = reconstruct_profile(shot(0).trajectory, t);
    const std::string csv = profile_csv(p);
    CHECK(csv.rfind("t,f1,f2,f1dot,f2dot\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == p.samples.size() + 3);
    const auto j = profile_metadata(p, 1e-7);
    CHECK(j["Lambda"] == 5.0);
    CHECK(j["t_star"].get<double>() == p.t_star);
}
