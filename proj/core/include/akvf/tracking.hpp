#pragma once

#include <string>
#include <vector>

#include "akvf/driver.hpp"

namespace akvf {

enum class VelocityMode { near_isometric, normal_baseline };

struct TrackingOptions {
    int steps = 60;
    double t_end = 1.0;
    VelocityMode mode = VelocityMode::near_isometric;
    SolveOptions solve; // discretization for the near-isometric field
};

struct Trajectory {
    std::vector<Vec2> positions; // steps + 1 entries; frozen after loss
    bool lost = false;
    int exit_step = -1;
};

struct TrackingResult {
    std::vector<double> times; // t_i = i dt
    std::vector<Trajectory> trajectories;
    VelocityMode mode = VelocityMode::near_isometric;
};

// Newton projection along grad(phi) until |phi| <= 1e-10 (max 50
// iterations); non-convergent points are dropped with a note to stderr.
std::vector<Vec2> project_seeds(const LevelSetSpec& ls, const std::vector<Vec2>& raw, double t);

// count points spread over Gamma(t0): directions fanned from the origin,
// radially bisected to the zero level, then Newton-projected.
std::vector<Vec2> default_seeds(const ProblemSpec& problem, int count);

// Explicit Euler: xi_i = xi_{i-1} + dt u_{t_i}(xi_{i-1}). near_isometric
// solves the saddle problem at each t_i and evaluates the discrete field;
// normal_baseline evaluates -phi_t grad(phi)/|grad(phi)|^2 analytically.
// Particles leaving the mesh (or hitting a degenerate gradient in baseline
// mode) are frozen and flagged.
TrackingResult track(const ProblemSpec& problem, const TrackingOptions& opts,
                     const std::vector<Vec2>& seeds);

struct TrackingMetrics {
    double max_drift = 0;            // max over steps and live seeds of |phi|
    std::vector<double> drift;       // per step
    std::vector<double> distortion;  // D(t_i): mean pairwise distance change
    int lost = 0;
};

TrackingMetrics tracking_metrics(const TrackingResult& result, const LevelSetSpec& ls);

// CSV: seed_id,step,t,x,y,lost
void write_trajectories_csv(const TrackingResult& result, const std::string& path);
// CSV: step,t,drift,distortion_iso,distortion_baseline; the drift column is
// the near-isometric one when that mode is present. Pass nullptr for a mode
// that was not run; its column reads "na".
void write_metrics_csv(const std::vector<double>& times, const TrackingMetrics* iso,
                       const TrackingMetrics* baseline, const std::string& path);

} // namespace akvf
