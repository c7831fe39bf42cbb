#include "eincoh/dynamics.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>

namespace eincoh {

namespace odeint = boost::numeric::odeint;

Model::Model(const StructuralTriple& t) : d1(t.d1), d2(t.d2), A(to_double(t.A)) {
    t.validate();
}

Derived derived(const State& u, const Model& m) {
    const double X1 = u[0], X2 = u[1], Y = u[2], Z = u[3];
    Derived d;
    d.G = m.d1 * X1 * X1 + m.d2 * X2 * X2;
    d.H = m.d1 * X1 + m.d2 * X2;
    d.R1 = (m.d1 - 1) * Y * Y + m.A * Z * Z;
    d.R2 = (m.d2 - 1) * Y * Z - 2.0 * m.d1 / m.d2 * m.A * Z * Z;
    return d;
}

State vector_field(const State& u, const Model& m) {
    const auto [G, H, R1, R2] = derived(u, m);
    const double c = (1 - H * H) / m.n();
    const double drift = H * (G + c);
    return {u[0] * H * (G + c - 1) + R1 - c,
            u[1] * H * (G + c - 1) + R2 - c,
            u[2] * (drift - u[0]),
            u[3] * (drift + u[0] - 2 * u[1])};
}

double conservation_residual(const State& u, const Model& m) {
    const auto [G, H, R1, R2] = derived(u, m);
    return (G - H * H + m.d1 * R1 + m.d2 * R2) / (m.n() - 1) - (1 - H * H) / m.n();
}

double distance(const State& a, const State& b) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

State reflect(const State& u) { return {-u[0], -u[1], u[2], u[3]}; }

State project_Y(State u, const Model& m) {
    for (int it = 0; it < 30; ++it) {
        const double r = conservation_residual(u, m);
        const double dr = (2.0 * m.d1 * (m.d1 - 1) * u[2] + m.d2 * (m.d2 - 1) * u[3]) / (m.n() - 1);
        if (dr == 0) break;
        const double step = r / dr;
        u[2] -= step;
        if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(u[2]))) break;
    }
    return u;
}

State on_ratio_line(const Model& m, double mu, double x) {
    const double d1 = m.d1, d2 = m.d2, n = m.n();
    const double K = d1 * (d1 - 1) + d2 * (d2 - 1) * mu - d1 * m.A * mu * mu;
    if (!(K > 0)) throw std::domain_error("on_ratio_line: no real Y for this ratio");
    const double y = std::sqrt((n - 1) / (n * K));
    return {x, x, y, mu * y};
}

CriticalPointSet critical_points(const StructuralTriple& t) {
    const Model m(t);
    const int d1 = t.d1, d2 = t.d2, n = t.n();
    CriticalPointSet cp;
    cp.p0_plus = {1.0 / d1, 0, 1.0 / d1, 0};
    cp.p0_minus = {-1.0 / d1, 0, 1.0 / d1, 0};
    cp.p0_eigenvalue = 2.0 / d1;
    cp.v1 = {-2.0 * d2 * (d2 - 1), 2.0 * d1 * (d2 - 1), -1.0 * d2 * (d2 - 1), 2.0 * d1 * (d1 + 1)};
    cp.v2 = {-1.0 * d1 * d1 + d1 * d2 - n, -2.0 * d1 * d1, -1.0 * d2, 0};

    const DiscriminantMu dm = discriminant_and_mu(t);
    cp.mu1_infinite = dm.mu1_infinite;
    if (dm.delta < 0 && !dm.mu1_infinite) return cp;

    auto y_of = [&](double mu) {
        return std::sqrt((n - 1.0) / n * (n + d1) /
                         (2.0 * d1 * n * (d1 - 1) + 1.0 * d2 * n * (d2 - 1) * mu));
    };
    const double x = 1.0 / n;
    cp.mu2 = dm.mu2.to_double();
    cp.y2 = y_of(cp.mu2);
    cp.p2_plus = State{x, x, cp.y2, cp.mu2 * cp.y2};
    cp.p2_minus = State{-x, -x, cp.y2, cp.mu2 * cp.y2};
    if (!dm.mu1_infinite) {
        cp.mu1 = dm.mu1.to_double();
        cp.y1 = y_of(cp.mu1);
        cp.p1_plus = State{x, x, cp.y1, cp.mu1 * cp.y1};
        cp.p1_minus = State{-x, -x, cp.y1, cp.mu1 * cp.y1};
    } else {
        cp.mu1 = std::numeric_limits<double>::infinity();
    }

    const double y2 = cp.y2, mu = cp.mu2;
    const double b = (n - 1.0) / n;
    const double c = 2 * y2 * y2 * ((d2 - 1) * mu - 2.0 * (n + d1) / d2 * m.A * mu * mu);
    const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4 * c));
    cp.p2_lambda = {(-b + disc) / 2.0, (-b - disc) / 2.0};
    return cp;
}

std::array<State, 4> jacobian_fd(const State& u, const Model& m, double h) {
    std::array<State, 4> J{};
    for (int j = 0; j < 4; ++j) {
        State up = u, um = u;
        up[j] += h;
        um[j] -= h;
        const State fp = vector_field(up, m), fm = vector_field(um, m);
        for (int i = 0; i < 4; ++i) J[i][j] = (fp[i] - fm[i]) / (2 * h);
    }
    return J;
}

State gamma_init(const Model& m, double s, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("gamma_init: eps must be positive");
    if (s < 0) throw std::invalid_argument("gamma_init: s must be non-negative");
    const double d1 = m.d1, d2 = m.d2, n = m.n();
    const State v1{-2 * d2 * (d2 - 1), 2 * d1 * (d2 - 1), -d2 * (d2 - 1), 2 * d1 * (d1 + 1)};
    const State v2{-d1 * d1 + d1 * d2 - n, -2 * d1 * d1, -d2, 0};
    State w;
    double norm = 0;
    for (int i = 0; i < 4; ++i) {
        w[i] = s * v1[i] + v2[i];
        norm += w[i] * w[i];
    }
    norm = std::sqrt(norm);
    State u{1 / d1, 0, 1 / d1, 0};
    for (int i = 0; i < 4; ++i) u[i] += eps * w[i] / norm;
    return project_Y(u, m);
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::CrossX1eqX2: return "CrossX1eqX2";
        case EventKind::CrossH0: return "CrossH0";
        case EventKind::ExitE: return "ExitE";
        case EventKind::NearP0Minus: return "NearP0Minus";
        case EventKind::NearP0Plus: return "NearP0Plus";
        case EventKind::HitGamma: return "HitGamma";
    }
    return "?";
}

DriftError::DriftError(double drift, double at)
    : std::runtime_error([&] {
          char buf[128];
          std::snprintf(buf, sizeof buf, "conservation drift %.3e exceeds tolerance at eta=%.6f",
                        drift, at);
          return std::string(buf);
      }()),
      max_drift(drift),
      eta(at) {}

namespace {

constexpr double kGammaTol = 1e-9;
constexpr double kEventTol = 1e-12;

// Locates a sign change of f on [a, b] given f(a) and f(b) of opposite sign
// (or f(b) == 0).  Returns the right end of the final bracket.
template <class F>
double bisect(F&& f, double a, double b, double fa) {
    while (b - a > kEventTol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = f(mid);
        if ((fm < 0) == (fa < 0) && fm != 0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return b;
}

struct Pending {
    double tau;
    EventKind kind;
    bool terminal;
};

}  // namespace

TrajectoryRecord integrate(const State& start, const Model& m, const IntegratorControls& c,
                           double eta0) {
    if (!(c.rtol > 0) || !(c.atol > 0) || !(c.horizon > 0))
        throw std::invalid_argument("integrate: tolerances and horizon must be positive");
    const int dir = c.direction < 0 ? -1 : 1;
    const State target = c.target ? *c.target
                                  : (dir > 0 ? State{-1.0 / m.d1, 0, 1.0 / m.d1, 0}
                                             : State{1.0 / m.d1, 0, 1.0 / m.d1, 0});
    const EventKind near_kind = dir > 0 ? EventKind::NearP0Minus : EventKind::NearP0Plus;

    auto rhs = [&](const State& x, State& dx, double) {
        dx = vector_field(x, m);
        if (dir < 0)
            for (auto& v : dx) v = -v;
    };
    auto stepper = odeint::make_dense_output(c.atol, c.rtol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(start, 0.0, 1e-3);

    TrajectoryRecord rec;
    auto eta_of = [&](double tau) { return eta0 + dir * tau; };
    auto state_at = [&](double tau) {
        State x;
        stepper.calc_state(tau, x);
        return x;
    };

    rec.max_drift = std::abs(conservation_residual(start, m));
    if (c.record_samples) rec.samples.push_back({eta0, start});
    double next_sample = c.sample_step;

    // Event functions; ExitE is the max of several constraint violations.
    auto f_cross = [&](const State& x) { return x[0] - x[1]; };
    auto f_h = [&](const State& x) { return derived(x, m).H; };
    auto f_near = [&](const State& x) { return distance(x, target) - c.endpoint_tol; };
    auto f_exit = [&](const State& x) {
        const double H = derived(x, m).H;
        return std::max({-x[2] - c.exit_tol, -x[3] - c.exit_tol, -H - 1 - c.exit_tol,
                         H - 1 - c.exit_tol});
    };

    bool done = distance(start, target) < c.endpoint_tol;
    if (done) {
        rec.events.push_back({near_kind, eta0, start});
        rec.stop_reason = to_string(near_kind);
    }
    constexpr int kSub = 4;
    constexpr long kMaxSteps = 20'000'000;
    long steps = 0;
    while (!done) {
        if (++steps > kMaxSteps) {
            rec.stop_reason = "max_steps";
            break;
        }
        stepper.do_step(rhs);
        const double t0 = stepper.previous_time();
        const double t1 = std::min(stepper.current_time(), c.horizon);

        std::vector<Pending> found;
        State xa = state_at(t0);
        double ta = t0;
        for (int k = 1; k <= kSub; ++k) {
            const double tb = k == kSub ? t1 : t0 + (t1 - t0) * k / kSub;
            const State xb = state_at(tb);
            auto scan = [&](auto&& f, EventKind kind, bool terminal, bool any_sign) {
                const double fa = f(xa), fb = f(xb);
                const bool hit = any_sign ? ((fa < 0 && fb >= 0) || (fa > 0 && fb <= 0))
                                          : (fa < 0 && fb >= 0);
                if (!hit) return;
                const double tau = bisect([&](double t) { return f(state_at(t)); }, ta, tb, fa);
                found.push_back({tau, kind, terminal});
            };
            if (f_cross(xa) != 0) scan(f_cross, EventKind::CrossX1eqX2, false, true);
            if (f_h(xa) != 0) scan(f_h, EventKind::CrossH0, c.stop_at_h0, true);
            scan([&](const State& x) { return -f_near(x); }, near_kind, true, false);
            scan(f_exit, EventKind::ExitE, true, false);
            if (!found.empty() &&
                std::any_of(found.begin(), found.end(), [](const Pending& p) { return p.terminal; }))
                break;
            xa = xb;
            ta = tb;
        }
        std::sort(found.begin(), found.end(),
                  [](const Pending& a, const Pending& b) { return a.tau < b.tau; });

        double t_end = t1;
        for (const Pending& p : found) {
            const State x = state_at(p.tau);
            Event ev{p.kind, eta_of(p.tau), x};
            const Derived d = derived(x, m);
            if (p.kind == EventKind::CrossX1eqX2 && std::abs(d.R1 - d.R2) < c.transversal_tol)
                ev.flagged = true;
            rec.events.push_back(ev);
            if (p.kind == EventKind::CrossH0 && std::abs(x[0]) < kGammaTol && std::abs(x[1]) < kGammaTol)
                rec.events.push_back({EventKind::HitGamma, ev.eta, x});
            if (p.terminal) {
                t_end = p.tau;
                done = true;
                rec.stop_reason = to_string(p.kind);
                break;
            }
        }

        if (c.record_samples) {
            if (c.sample_step > 0) {
                while (next_sample < t_end) {
                    rec.samples.push_back({eta_of(next_sample), state_at(next_sample)});
                    next_sample += c.sample_step;
                }
            } else if (!done) {
                rec.samples.push_back({eta_of(t_end), state_at(t_end)});
            }
        }

        const State x_end = state_at(t_end);
        rec.max_drift = std::max(rec.max_drift, std::abs(conservation_residual(x_end, m)));
        if (rec.max_drift > c.drift_tol) throw DriftError(rec.max_drift, eta_of(t_end));

        if (!done && t1 >= c.horizon) {
            done = true;
            rec.stop_reason = "horizon";
        }
        if (done) {
            if (c.record_samples && (rec.samples.empty() || rec.samples.back().eta != eta_of(t_end)))
                rec.samples.push_back({eta_of(t_end), x_end});
            break;
        }
        if (c.project_each_step) {
            const State px = project_Y(stepper.current_state(), m);
            stepper.initialize(px, stepper.current_time(), stepper.current_time_step());
        }
    }

    if (dir < 0) {
        std::reverse(rec.samples.begin(), rec.samples.end());
        std::reverse(rec.events.begin(), rec.events.end());
    }
    rec.winding = winding_count(rec);
    rec.winding_indeterminate =
        std::any_of(rec.events.begin(), rec.events.end(), [&](const Event& e) {
            return e.kind == EventKind::CrossX1eqX2 && e.flagged && derived(e.state, m).H > 0;
        });
    return rec;
}

int winding_count(const TrajectoryRecord& traj) {
    int w = 0;
    for (const Event& e : traj.events) {
        if (e.kind != EventKind::CrossX1eqX2) continue;
        // H > 0 is the same as X1 > 0 on X1 = X2
        if (e.state[0] > 0) ++w;
    }
    return w;
}

double s_bullet(const StructuralTriple& t, bool* defined) {
    t.validate();
    const Rational a = t.d1, b = t.d2;
    const Rational tau = (b - 1) - (a + 1) / (b * (b - 1)) * 2 * a * a * t.A;
    const bool ok = t.A > 0 && tau > 0;
    if (defined) *defined = ok;
    return ok ? to_double(Rational(a / tau)) : 1.0;
}

std::optional<double> shooting_objective(const Model& m, double s, const ShootControls& c,
                                         TrajectoryRecord* leg) {
    IntegratorControls ode = c.ode;
    ode.direction = 1;
    ode.stop_at_h0 = true;
    ode.record_samples = leg != nullptr;
    TrajectoryRecord rec = integrate(gamma_init(m, s, c.eps), m, ode);
    std::optional<double> g;
    for (const Event& e : rec.events)
        if (e.kind == EventKind::CrossH0) {
            g = e.state[0];
            break;
        }
    if (leg) *leg = std::move(rec);
    return g;
}

namespace {

struct Root {
    double s, g, lo, hi;
};

std::optional<Root> refine(const Model& m, double lo, double hi, double glo, double ghi,
                           const ShootControls& c) {
    auto g = [&](double s) {
        auto v = shooting_objective(m, s, c);
        if (!v) throw NoSignChange("objective undefined inside bracket");
        return *v;
    };
    if (glo == 0) return Root{lo, 0, lo, lo};
    if (ghi == 0) return Root{hi, 0, hi, hi};
    std::uintmax_t iters = 200;
    auto tol = [&](double a, double b) { return std::abs(b - a) <= 4e-16 * std::abs(a); };
    try {
        auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, iters);
        const double ga = g(a), gb = g(b);
        return std::abs(ga) <= std::abs(gb) ? Root{a, ga, lo, hi} : Root{b, gb, lo, hi};
    } catch (const NoSignChange&) {
        return std::nullopt;
    }
}

}  // namespace

ShootingResult shoot(const StructuralTriple& t, const ShootControls& c) {
    t.validate();
    if (t.A == 0) throw std::invalid_argument("shoot: A = 0 is the product case; nothing to shoot");
    const Model m(t);
    ShootingResult r;
    r.s_ref = s_bullet(t, &r.s_bullet_defined);

    std::vector<std::future<std::optional<double>>> jobs;
    for (int j = c.grid_lo; j <= c.grid_hi; ++j) {
        const double s = std::ldexp(r.s_ref, j);
        r.sweep.push_back({s, std::nullopt});
        jobs.push_back(std::async(std::launch::async,
                                  [&m, &c, s] { return shooting_objective(m, s, c); }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) r.sweep[i].g = jobs[i].get();

    std::vector<std::future<std::optional<Root>>> refs;
    for (std::size_t i = 0; i + 1 < r.sweep.size(); ++i) {
        const auto& a = r.sweep[i];
        const auto& b = r.sweep[i + 1];
        if (!a.g || !b.g) continue;
        if ((*a.g > 0 && *b.g > 0) || (*a.g < 0 && *b.g < 0)) continue;
        if (*a.g == 0 && i > 0) continue;  // counted with the previous bracket
        refs.push_back(std::async(std::launch::async, [&, a, b] {
            return refine(m, a.s, b.s, *a.g, *b.g, c);
        }));
    }
    std::vector<Root> roots;
    for (auto& f : refs)
        if (auto v = f.get()) roots.push_back(*v);
    if (roots.empty()) {
        std::ostringstream os;
        os << "no sign change of X1 at H = 0 for s in [" << r.sweep.front().s << ", "
           << r.sweep.back().s << "]";
        throw NoSignChange(os.str());
    }
    for (const Root& q : roots) r.roots.push_back(q.s);

    // primary root: nearest to the reference parameter on a log scale
    const Root best = *std::min_element(roots.begin(), roots.end(), [&](const Root& a, const Root& b) {
        return std::abs(std::log(a.s / r.s_ref)) < std::abs(std::log(b.s / r.s_ref));
    });
    r.s_star = best.s;
    r.objective_at_root = best.g;
    r.bracket = {best.lo, best.hi};

    if (c.richardson) {
        ShootControls half = c;
        half.eps = c.eps / 2;
        const auto glo = shooting_objective(m, best.lo, half);
        const auto ghi = shooting_objective(m, best.hi, half);
        if (glo && ghi && ((*glo <= 0) != (*ghi <= 0) || *glo == 0 || *ghi == 0)) {
            if (auto q = refine(m, best.lo, best.hi, *glo, *ghi, half)) {
                r.s_star_half_eps = q->s;
                r.richardson_ok = std::abs(q->s - r.s_star) < c.richardson_tol * std::abs(r.s_star);
            }
        }
    } else {
        r.richardson_ok = true;
        r.s_star_half_eps = r.s_star;
    }

    // Glue: backward tail into p0+, forward leg to H = 0, mirror image by the Z2 symmetry.
    const State u0 = gamma_init(m, r.s_star, c.eps);
    const State p0p{1.0 / m.d1, 0, 1.0 / m.d1, 0}, p0m{-1.0 / m.d1, 0, 1.0 / m.d1, 0};
    IntegratorControls back = c.ode;
    back.direction = -1;
    back.target = p0p;
    back.endpoint_tol = 0.1 * c.ode.endpoint_tol;
    back.horizon = 100;
    const TrajectoryRecord tail = integrate(u0, m, back);

    TrajectoryRecord leg;
    shooting_objective(m, r.s_star, c, &leg);

    double eta_c = leg.samples.back().eta;
    for (const Event& e : leg.events)
        if (e.kind == EventKind::CrossH0) eta_c = e.eta;

    TrajectoryRecord& g = r.trajectory;
    for (const Sample& s : tail.samples)
        if (s.eta < 0) g.samples.push_back(s);
    for (const Sample& s : leg.samples)
        if (s.eta <= eta_c) g.samples.push_back(s);
    const std::size_t half_n = g.samples.size();
    for (std::size_t i = half_n; i-- > 0;) {
        const Sample& s = g.samples[i];
        if (s.eta >= eta_c) continue;
        g.samples.push_back({2 * eta_c - s.eta, reflect(s.state)});
    }

    for (const Event& e : tail.events)
        if (e.kind == EventKind::NearP0Plus || e.kind == EventKind::CrossX1eqX2) g.events.push_back(e);
    for (const Event& e : leg.events)
        if (e.eta <= eta_c) g.events.push_back(e);
    const std::size_t half_e = g.events.size();
    for (std::size_t i = half_e; i-- > 0;) {
        Event e = g.events[i];
        if (e.eta >= eta_c) continue;
        if (e.kind == EventKind::NearP0Plus) e.kind = EventKind::NearP0Minus;
        e.eta = 2 * eta_c - e.eta;
        e.state = reflect(e.state);
        g.events.push_back(e);
    }
    g.max_drift = std::max(tail.max_drift, leg.max_drift);
    g.winding = winding_count(g);
    g.winding_indeterminate = tail.winding_indeterminate || leg.winding_indeterminate;
    g.stop_reason = "glued";

    r.gap_p0_plus = distance(g.samples.front().state, p0p);
    r.gap_p0_minus = distance(g.samples.back().state, p0m);
    r.certified = std::abs(r.objective_at_root) < c.objective_tol && r.richardson_ok &&
                  r.gap_p0_plus < c.ode.endpoint_tol && r.gap_p0_minus < c.ode.endpoint_tol;
    return r;
}

double theta_drift_constant(const StructuralTriple& t, double* mu2_out) {
    const DiscriminantMu dm = discriminant_and_mu(t);
    if (dm.delta < 0)
        throw ThetaDomainError("theta IVP undefined: discriminant is negative, mu2 is not real");
    const int d1 = t.d1, d2 = t.d2, n = t.n();
    const double sd = dm.delta.get_d() == 0 ? 0.0 : std::sqrt(dm.delta.get_d());
    const double mu2 = 2.0 * (d1 - 1) / (d2 - 1 + sd);
    // 4(d1-1) - 2(d2-1)mu2 rewritten so that delta = 0 gives exactly zero
    const double inner = 4.0 * (d1 - 1) * sd / (d2 - 1 + sd);
    if (mu2_out) *mu2_out = mu2;
    return std::sqrt((n - 1.0) * (n + d1)) / n *
           std::sqrt(inner / (2.0 * d1 * (d1 - 1) + 1.0 * d2 * (d2 - 1) * mu2));
}

ThetaIVPResult theta_ivp(const StructuralTriple& t, double horizon, double window) {
    t.validate();
    ThetaIVPResult r;
    r.c = theta_drift_constant(t, &r.mu2_used);
    const double n = t.n();
    const double a = (n - 1) / (2 * n), c = r.c;
    auto slope = [&](double th, double eta) { return a * std::tanh(eta / n) * std::sin(2 * th) + c; };
    using S1 = std::array<double, 1>;
    auto rhs = [&](const S1& x, S1& dx, double eta) { dx[0] = slope(x[0], eta); };
    auto stepper = odeint::make_dense_output(1e-14, 1e-12, odeint::runge_kutta_dopri5<S1>());
    stepper.initialize(S1{0.0}, 0.0, 1e-3);

    double quiet_since = 0;  // start of the current run of |theta'| < 1e-10
    bool quiet = std::abs(slope(0, 0)) < 1e-10;
    while (stepper.current_time() < horizon) {
        stepper.do_step(rhs);
        const double eta = stepper.current_time();
        const double th = stepper.current_state()[0];
        const bool q = std::abs(slope(th, eta)) < 1e-10;
        if (q && !quiet) quiet_since = stepper.previous_time();
        quiet = q;
        r.eta_horizon = eta;
        r.final_theta = th;
        if (quiet && eta - quiet_since >= window) {
            r.theta_limit = th;
            break;
        }
    }
    return r;
}

Verdict numeric_second(const StructuralTriple& t, Verdict v, ThetaIVPResult* out) {
    if (v.tag != VerdictTag::Existence) return v;
    const ThetaIVPResult r = theta_ivp(t);
    if (out) *out = r;
    const double bound = 0.75 * M_PI;
    char buf[96];
    if (r.theta_limit)
        std::snprintf(buf, sizeof buf, "%.12f", *r.theta_limit);
    else
        std::snprintf(buf, sizeof buf, "unsettled (theta=%.6f at eta=%.1f)", r.final_theta, r.eta_horizon);
    const bool fires = r.theta_limit && *r.theta_limit < bound;
    v.evidence.push_back({"theta limit < 3pi/4", buf, fires});
    if (fires) v.tag = VerdictTag::TwoMetricsNumeric;
    return v;
}

BarrierValues barrier_values(const State& u, const Model& m) {
    const double X1 = u[0], X2 = u[1], Y = u[2], Z = u[3];
    const auto [G, H, R1, R2] = derived(u, m);
    const double d1 = m.d1, d2 = m.d2, n = m.n();
    const double c = (1 - H * H) / n;
    const double w = X1 + d2 / (2 * d1) * X2;
    BarrierValues b;
    if (X2 != 0 && Y != 0) b.S = Z / Y * w / X2;
    if (Y != 0 && Z != 0) b.T = c / (Y * Z);
    b.P = X1 * (R2 - c) - X2 * (R1 - c) - 2 * X2 * (X1 - X2) * w;
    b.Q = 4 * X2 * w * (H + d2 / (2 * d1) * X2) + (2 * X1 + 2 * X2 + 3 * d2 / d1 * X2) * c -
          2 * (d2 - 1) * X1 * Y * Z - X2 * (2 * (d1 - 1) * Y * Y + 3 * d2 / d1 * (d2 - 1) * Y * Z);
    const double curv = (d1 * R1 + d2 * R2) / (n - 1);
    b.P_surface = X1 * R2 - X2 * R1 - curv * (X1 - X2) +
                  ((H * H - G) / (n - 1) - 2 * X2 * w) * (X1 - X2);
    return b;
}

std::string trajectory_csv(const TrajectoryRecord& traj, const Model& m) {
    std::string out = "eta,X1,X2,Y,Z,H,residual\n";
    char buf[256];
    for (const Sample& s : traj.samples) {
        const State& x = s.state;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.eta, x[0],
                      x[1], x[2], x[3], derived(x, m).H, conservation_residual(x, m));
        out += buf;
    }
    return out;
}

}  // namespace eincoh
