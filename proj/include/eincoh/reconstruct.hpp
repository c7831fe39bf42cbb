#pragma once

#include "eincoh/dynamics.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace eincoh {

struct ProfileSample {
    double t, f1, f2, f1dot, f2dot;
    double eta = 0;  // phase-space time of the source sample; 0 for extrapolated ends
};

struct MetricProfile {
    double Lambda = 0;
    std::vector<ProfileSample> samples;  // one per trajectory sample
    ProfileSample start{}, end{};        // extrapolated limits at t = 0 and t = t_star
    double t_star = 0;
};

struct ReconstructError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lambda <= 0 selects the default normalization n - 1.
MetricProfile reconstruct_profile(const TrajectoryRecord& traj, const StructuralTriple& t,
                                  double Lambda = 0);

// Inverse direction: the phase state of one profile sample.
State to_phase(const ProfileSample& s, const Model& m, double Lambda);

struct ResidualReport {
    double max = 0;
    double eq1 = 0, eq2 = 0, trace = 0, constraint = 0;
};

// Residuals are multiplied through by f_i^2 (f_1^2 for the constraint) so the
// collapsing ends stay bounded.
ResidualReport einstein_residuals(const MetricProfile& p, const StructuralTriple& t);
double einstein_residual(const MetricProfile& p, const StructuralTriple& t);

// The invariant curve X1 = X2, Z = mu2 Y from near p2+ to near p2-.  Ends are
// taken once 1 - H^2 drops below h_gap.
TrajectoryRecord ratio_line_trajectory(const StructuralTriple& t, double h_gap = 1e-7,
                                       double sample_step = 5e-3);

std::string profile_csv(const MetricProfile& p);
nlohmann::ordered_json profile_metadata(const MetricProfile& p, double residual);

}  // namespace eincoh
