#pragma once

#include "eincoh/thresholds.hpp"

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eincoh {

using State = std::array<double, 4>;  // X1, X2, Y, Z

struct Model {
    int d1 = 2, d2 = 2;
    double A = 0.0;

    Model() = default;
    Model(int d1_, int d2_, double A_) : d1(d1_), d2(d2_), A(A_) {}
    explicit Model(const StructuralTriple& t);

    int n() const { return d1 + d2; }
};

struct Derived {
    double G, H, R1, R2;
};

Derived derived(const State& u, const Model& m);
State vector_field(const State& u, const Model& m);
double conservation_residual(const State& u, const Model& m);
double distance(const State& a, const State& b);
State reflect(const State& u);  // (X1, X2) -> -(X1, X2)

// Newton correction of Y alone onto the conservation surface.
State project_Y(State u, const Model& m);

// Point of {X1 = X2 = x, Z = mu Y} on the conservation surface.  Y does not
// depend on x there.
State on_ratio_line(const Model& m, double mu, double x);

struct CriticalPointSet {
    State p0_plus, p0_minus;
    std::optional<State> p1_plus, p1_minus;  // absent when A == 0 or delta < 0
    std::optional<State> p2_plus, p2_minus;  // absent when delta < 0
    double mu1 = 0, mu2 = 0;
    bool mu1_infinite = false;
    double y1 = 0, y2 = 0;

    double p0_eigenvalue = 0;        // 2/d1
    State v1{}, v2{};                // unstable eigenvectors at p0+ tangent to E
    std::array<std::complex<double>, 2> p2_lambda{};  // remaining eigenvalues at p2+
};

CriticalPointSet critical_points(const StructuralTriple& t);

// Central differences; J[i][j] = d f_i / d u_j.
std::array<State, 4> jacobian_fd(const State& u, const Model& m, double h = 1e-7);

State gamma_init(const Model& m, double s, double eps);

enum class EventKind { CrossX1eqX2, CrossH0, ExitE, NearP0Minus, NearP0Plus, HitGamma };
const char* to_string(EventKind k);

struct Event {
    EventKind kind;
    double eta;
    State state;
    bool flagged = false;  // crossing with R1 ~ R2, transversality not guaranteed
};

struct Sample {
    double eta;
    State state;
};

struct TrajectoryRecord {
    std::vector<Sample> samples;
    std::vector<Event> events;  // ascending eta
    int winding = 0;
    bool winding_indeterminate = false;
    double max_drift = 0;
    std::string stop_reason;
};

struct IntegratorControls {
    double rtol = 1e-11;
    double atol = 1e-13;
    double horizon = 400;       // length of the eta interval
    double drift_tol = 1e-8;
    double endpoint_tol = 1e-6;
    double sample_step = 5e-3;  // 0 records only accepted steps
    double exit_tol = 1e-9;
    double transversal_tol = 1e-9;
    int direction = 1;          // -1 integrates backwards in eta
    bool stop_at_h0 = false;
    bool record_samples = true;
    bool project_each_step = false;
    std::optional<State> target;   // defaults to p0- (forward) / p0+ (backward)
};

struct DriftError : std::runtime_error {
    double max_drift;
    double eta;
    DriftError(double drift, double at);
};

TrajectoryRecord integrate(const State& start, const Model& m, const IntegratorControls& c,
                           double eta0 = 0.0);

int winding_count(const TrajectoryRecord& traj);

struct ShootControls {
    IntegratorControls ode;
    double eps = 1e-6;
    double objective_tol = 1e-9;
    double richardson_tol = 1e-6;   // relative shift of s* at eps/2
    int grid_lo = -10, grid_hi = 20;
    bool richardson = true;
};

struct NoSignChange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepPoint {
    double s;
    std::optional<double> g;  // empty if H = 0 was never reached
};

struct ShootingResult {
    double s_ref = 1;
    bool s_bullet_defined = false;
    double s_star = 0;
    double objective_at_root = 0;
    std::pair<double, double> bracket{0, 0};
    std::vector<double> roots;  // every root found in the sweep, ascending
    std::vector<SweepPoint> sweep;
    double s_star_half_eps = 0;
    bool richardson_ok = false;
    double gap_p0_plus = 0, gap_p0_minus = 0;
    TrajectoryRecord trajectory;  // glued: backward tail, forward leg, reflection
    bool certified = false;
};

double s_bullet(const StructuralTriple& t, bool* defined = nullptr);

// X1 at the unique H = 0 crossing of gamma_s; empty if never reached.
std::optional<double> shooting_objective(const Model& m, double s, const ShootControls& c,
                                         TrajectoryRecord* leg = nullptr);

ShootingResult shoot(const StructuralTriple& t, const ShootControls& c = {});

struct ThetaDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ThetaIVPResult {
    std::optional<double> theta_limit;  // empty when theta never settles
    double eta_horizon = 0;
    double mu2_used = 0;
    double c = 0;
    double final_theta = 0;
};

double theta_drift_constant(const StructuralTriple& t, double* mu2 = nullptr);
ThetaIVPResult theta_ivp(const StructuralTriple& t, double horizon = 400, double window = 5);

// Upgrades Existence to TwoMetricsNumeric when the theta limit lies below 3 pi/4.
Verdict numeric_second(const StructuralTriple& t, Verdict v, ThetaIVPResult* out = nullptr);

struct BarrierValues {
    std::optional<double> S, T;
    double P = 0, Q = 0;
    double P_surface = 0;  // P in the form that already uses the conservation law
};

BarrierValues barrier_values(const State& u, const Model& m);

std::string trajectory_csv(const TrajectoryRecord& traj, const Model& m);

}  // namespace eincoh
