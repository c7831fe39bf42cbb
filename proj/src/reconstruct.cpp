#include "eincoh/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace eincoh {

namespace {

// Rate of exp-decay of 1 - H^2 towards an end, d/deta log(1 - H^2) in absolute value.
double gap_rate(const State& u, const Model& m) {
    const Derived d = derived(u, m);
    return 2 * std::abs(d.H) * (d.G + (1 - d.H * d.H) / m.n());
}

// Quadratic through three points evaluated at x.
double quad_extrap(const double* t, const double* y, double x) {
    double r = 0;
    for (int i = 0; i < 3; ++i) {
        double w = 1;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= (x - t[j]) / (t[i] - t[j]);
        r += w * y[i];
    }
    return r;
}

ProfileSample extrapolate(const ProfileSample* s, double t) {
    const double ts[3] = {s[0].t, s[1].t, s[2].t};
    auto field = [&](double ProfileSample::*f) {
        const double ys[3] = {s[0].*f, s[1].*f, s[2].*f};
        return quad_extrap(ts, ys, t);
    };
    return {t, field(&ProfileSample::f1), field(&ProfileSample::f2), field(&ProfileSample::f1dot),
            field(&ProfileSample::f2dot), 0};
}

}  // namespace

MetricProfile reconstruct_profile(const TrajectoryRecord& traj, const StructuralTriple& t,
                                  double Lambda) {
    const Model m(t);
    const double n = m.n();
    if (Lambda <= 0) Lambda = n - 1;

    // Drop samples that sit on top of their predecessor (event points next to
    // grid points); they only amplify rounding in the difference quotients.
    std::vector<Sample> pts;
    for (const Sample& s : traj.samples)
        if (pts.empty() || s.eta - pts.back().eta > 1e-6) pts.push_back(s);
    if (pts.size() < 5) throw ReconstructError("reconstruct: need at least 5 samples");

    MetricProfile p;
    p.Lambda = Lambda;
    std::vector<double> inv_w(pts.size()), dinv_w(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const State& u = pts[i].state;
        const double H = derived(u, m).H;
        if (!(1 - H * H > 0)) throw ReconstructError("reconstruct: H^2 = 1 inside the trajectory");
        if (!(u[2] > 0) || !(u[3] > 0))
            throw ReconstructError("reconstruct: Y or Z vanishes inside the trajectory");
        const double W = std::sqrt(n * Lambda / (1 - H * H));
        const double f1 = 1 / (u[2] * W);
        const double f2 = std::sqrt(f1 / (u[3] * W));
        p.samples.push_back({0, f1, f2, u[0] / u[2], u[1] * f2 * W, pts[i].eta});
        const State du = vector_field(u, m);
        const double dH = m.d1 * du[0] + m.d2 * du[1];
        inv_w[i] = 1 / W;
        dinv_w[i] = -H * dH / (1 - H * H) / W;  // d(1/W)/d eta
    }

    // t(eta): trapezoid with the endpoint-derivative correction, O(h^4).
    // Before the first sample 1/W decays like exp(rate eta / 2), whose tail integral is 2/(rate W).
    double t_now = 2 * inv_w.front() / gap_rate(pts.front().state, m);
    p.samples[0].t = t_now;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double h = pts[i].eta - pts[i - 1].eta;
        t_now += h / 2 * (inv_w[i - 1] + inv_w[i]) + h * h / 12 * (dinv_w[i - 1] - dinv_w[i]);
        p.samples[i].t = t_now;
    }
    p.t_star = t_now + 2 * inv_w.back() / gap_rate(pts.back().state, m);

    p.start = extrapolate(p.samples.data(), 0.0);
    p.end = extrapolate(p.samples.data() + p.samples.size() - 3, p.t_star);
    return p;
}

State to_phase(const ProfileSample& s, const Model& m, double Lambda) {
    const double l1 = s.f1dot / s.f1, l2 = s.f2dot / s.f2;
    const double tr = m.d1 * l1 + m.d2 * l2;
    const double W = std::sqrt(tr * tr + m.n() * Lambda);
    return {l1 / W, l2 / W, 1 / (s.f1 * W), s.f1 / (s.f2 * s.f2 * W)};
}

ResidualReport einstein_residuals(const MetricProfile& p, const StructuralTriple& t) {
    const auto& s = p.samples;
    if (s.size() < 7) throw ReconstructError("einstein_residual: need at least 5 interior samples");
    const double d1 = t.d1, d2 = t.d2, n = t.n(), A = to_double(t.A), Lam = p.Lambda;
    // Near the collapsing ends the samples crowd together in t and the
    // difference quotient would mostly see rounding in f_dot, so the stencil
    // is widened to a minimum spacing.
    const double h_min = 1e-5 * p.t_star;
    ResidualReport r;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        std::size_t lo = i - 1, hi = i + 1;
        while (lo > 0 && s[i].t - s[lo].t < h_min) --lo;
        while (hi + 1 < s.size() && s[hi].t - s[i].t < h_min) ++hi;
        if (s[i].t - s[lo].t < h_min || s[hi].t - s[i].t < h_min) continue;
        const ProfileSample &L0 = s[lo], &R0 = s[hi];
        const double h1 = s[i].t - L0.t, h2 = R0.t - s[i].t;
        auto ddot = [&](double ProfileSample::*f) {
            return -h2 / (h1 * (h1 + h2)) * (L0.*f) + (h2 - h1) / (h1 * h2) * (s[i].*f) +
                   h1 / (h2 * (h1 + h2)) * (R0.*f);
        };
        const double f1 = s[i].f1, f2 = s[i].f2, a = s[i].f1dot, b = s[i].f2dot;
        const double a2 = ddot(&ProfileSample::f1dot), b2 = ddot(&ProfileSample::f2dot);
        const double q = f1 / f2;  // f1/f2, bounded
        const double q2 = q * q, q4 = q2 * q2;

        const double e1 = f1 * a2 - a * a + (d1 * a + d2 * b * q) * a - (d1 - 1) - A * q4 + Lam * f1 * f1;
        const double e2 = f2 * b2 - b * b + (d1 * a / q + d2 * b) * b - (d2 - 1) + 2 * d1 / d2 * A * q2 +
                          Lam * f2 * f2;
        const double tr = d1 * a2 * f1 + d2 * b2 * f1 * f1 / f2 + Lam * f1 * f1;
        const double con = d1 * a * a + d2 * b * b * q2 - (d1 * a + d2 * b * q) * (d1 * a + d2 * b * q) +
                           d1 * ((d1 - 1) + A * q4) + d2 * ((d2 - 1) * q2 - 2 * d1 / d2 * A * q4) -
                           (n - 1) * Lam * f1 * f1;
        r.eq1 = std::max(r.eq1, std::abs(e1));
        r.eq2 = std::max(r.eq2, std::abs(e2));
        r.trace = std::max(r.trace, std::abs(tr));
        r.constraint = std::max(r.constraint, std::abs(con));
    }
    r.max = std::max({r.eq1, r.eq2, r.trace, r.constraint});
    return r;
}

double einstein_residual(const MetricProfile& p, const StructuralTriple& t) {
    return einstein_residuals(p, t).max;
}

TrajectoryRecord ratio_line_trajectory(const StructuralTriple& t, double h_gap, double sample_step) {
    const Model m(t);
    const CriticalPointSet cp = critical_points(t);
    if (!cp.p2_plus) throw ReconstructError("ratio line needs a real mu2 (discriminant >= 0)");
    const State mid = on_ratio_line(m, cp.mu2, 0.0);
    // On the line 1 - H^2 = n^2 (1/n^2 - X^2) and |X -+ 1/n| sqrt(2) is the distance to p2+-.
    const double n = m.n();
    const double tol = h_gap / (n * std::sqrt(2.0));
    IntegratorControls c;
    c.sample_step = sample_step;
    c.endpoint_tol = tol;
    c.horizon = 2000;
    c.target = cp.p2_minus;
    const TrajectoryRecord fw = integrate(mid, m, c);
    c.direction = -1;
    c.target = cp.p2_plus;
    const TrajectoryRecord bw = integrate(mid, m, c);

    TrajectoryRecord r;
    for (const Sample& s : bw.samples)
        if (s.eta < 0) r.samples.push_back(s);
    r.samples.insert(r.samples.end(), fw.samples.begin(), fw.samples.end());
    r.events = bw.events;
    r.events.insert(r.events.end(), fw.events.begin(), fw.events.end());
    r.max_drift = std::max(fw.max_drift, bw.max_drift);
    r.winding = winding_count(r);
    r.stop_reason = fw.stop_reason;
    return r;
}

std::string profile_csv(const MetricProfile& p) {
    std::string out = "t,f1,f2,f1dot,f2dot\n";
    char buf[256];
    auto row = [&](const ProfileSample& s) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.f1, s.f2, s.f1dot,
                      s.f2dot);
        out += buf;
    };
    row(p.start);
    for (const auto& s : p.samples) row(s);
    row(p.end);
    return out;
}

nlohmann::ordered_json profile_metadata(const MetricProfile& p, double residual) {
    nlohmann::ordered_json j;
    j["Lambda"] = p.Lambda;
    j["t_star"] = p.t_star;
    j["residual"] = residual;
    j["samples"] = p.samples.size();
    auto end = [](const ProfileSample& s) {
        return nlohmann::ordered_json{{"t", s.t}, {"f1", s.f1}, {"f2", s.f2}, {"f1dot", s.f1dot},
                                      {"f2dot", s.f2dot}};
    };
    j["start"] = end(p.start);
    j["end"] = end(p.end);
    return j;
}

}  // namespace eincoh
