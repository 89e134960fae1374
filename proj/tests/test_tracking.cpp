#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "akvf/problems.hpp"
#include "akvf/tracking.hpp"

using namespace akvf;

namespace {

// ellipse frozen in time: the only solution is u = 0
ProblemSpec static_ellipse() {
    ProblemSpec p;
    p.name = "static-ellipse";
    p.domain = DomainSpec::square_minus_disc(4.0 / 3.0, 0.2);
    LevelSetSpec ls;
    ls.phi = [](const Vec2& x, double) { return 1.3 * x.x() * x.x() + x.y() * x.y() - 1.0; };
    ls.phi_t = [](const Vec2&, double) { return 0.0; };
    ls.grad_phi = [](const Vec2& x, double) { return Vec2(2.6 * x.x(), 2.0 * x.y()); };
    ls.grad_phi_t = [](const Vec2&, double) { return Vec2(0, 0); };
    ls.hessian_phi = [](const Vec2&, double) {
        Mat2 h;
        h << 2.6, 0, 0, 2.0;
        return h;
    };
    p.level_set = ls;
    p.expected_kernel_dim = 0;
    return p;
}

Vec2 rotate_exact(const Vec2& x0, double t) {
    const double a = 0.1 * t;
    return {x0.x() * std::cos(a) + x0.y() * std::sin(a),
            -x0.x() * std::sin(a) + x0.y() * std::cos(a)};
}

TrackingResult run_rotating(int steps, VelocityMode mode, const std::vector<Vec2>& seeds) {
    const ProblemSpec p = problem_by_name("rotating");
    TrackingOptions opts;
    opts.steps = steps;
    opts.t_end = 1.0;
    opts.mode = mode;
    opts.solve.k = 1;
    opts.solve.level = 1;
    return track(p, opts, seeds);
}

} // namespace

TEST_SUITE("tracking") {

TEST_CASE("seed generation lands on the level set") {
    const ProblemSpec p = problem_by_name("rotating");
    const std::vector<Vec2> seeds = default_seeds(p, 12);
    REQUIRE(seeds.size() == 12);
    for (const Vec2& s : seeds) {
        CHECK(std::abs(p.level_set->phi(s, 0.0)) <= 1e-10);
    }

    const std::vector<Vec2> proj = project_seeds(*p.level_set, {Vec2(2.0, 0.0)}, 0.0);
    REQUIRE(proj.size() == 1);
    CHECK(std::abs(proj[0].x() - 1.0 / std::sqrt(1.3)) <= 1e-8);
    CHECK(std::abs(proj[0].y()) <= 1e-12);
}

TEST_CASE("a stationary interface leaves particles in place") {
    const ProblemSpec p = static_ellipse();
    const std::vector<Vec2> seeds = default_seeds(p, 8);
    REQUIRE(seeds.size() == 8);

    for (const VelocityMode mode : {VelocityMode::near_isometric, VelocityMode::normal_baseline}) {
        TrackingOptions opts;
        opts.steps = 5;
        opts.t_end = 1.0;
        opts.mode = mode;
        opts.solve.k = 1;
        opts.solve.level = 1;
        const TrackingResult res = track(p, opts, seeds);
        REQUIRE(res.trajectories.size() == seeds.size());
        for (size_t i = 0; i < seeds.size(); ++i) {
            CHECK_FALSE(res.trajectories[i].lost);
            for (const Vec2& pos : res.trajectories[i].positions) {
                CHECK((pos - seeds[i]).norm() <= 1e-9);
            }
        }
    }
}

TEST_CASE("explicit Euler against the exact rotating flow") {
    const ProblemSpec p = problem_by_name("rotating");
    const std::vector<Vec2> seeds = default_seeds(p, 6);
    REQUIRE(seeds.size() == 6);

    std::vector<double> errs, drifts;
    for (const int steps : {8, 16, 32}) {
        const TrackingResult res = run_rotating(steps, VelocityMode::near_isometric, seeds);
        double err = 0;
        for (size_t i = 0; i < seeds.size(); ++i) {
            REQUIRE_FALSE(res.trajectories[i].lost);
            REQUIRE(res.trajectories[i].positions.size() == static_cast<size_t>(steps) + 1);
            err = std::max(err,
                           (res.trajectories[i].positions.back() - rotate_exact(seeds[i], 1.0)).norm());
        }
        errs.push_back(err);
        drifts.push_back(tracking_metrics(res, *p.level_set).max_drift);
    }

    // the discrete velocity reproduces the rigid rotation to rounding, so the
    // position error is pure time discretization and halves with dt
    for (int i = 0; i + 1 < 3; ++i) {
        CHECK(errs[i] / errs[i + 1] >= 1.7);
        CHECK(errs[i] / errs[i + 1] <= 2.4);
        CHECK(drifts[i] / drifts[i + 1] >= 1.7);
    }
}

TEST_CASE("tracking is deterministic") {
    const ProblemSpec p = problem_by_name("rotating");
    const std::vector<Vec2> seeds = default_seeds(p, 4);
    const TrackingResult a = run_rotating(4, VelocityMode::near_isometric, seeds);
    const TrackingResult b = run_rotating(4, VelocityMode::near_isometric, seeds);
    REQUIRE(a.trajectories.size() == b.trajectories.size());
    for (size_t i = 0; i < a.trajectories.size(); ++i) {
        REQUIRE(a.trajectories[i].positions.size() == b.trajectories[i].positions.size());
        for (size_t s = 0; s < a.trajectories[i].positions.size(); ++s) {
            CHECK(a.trajectories[i].positions[s] == b.trajectories[i].positions[s]);
        }
    }
}

TEST_CASE("particles outside the mesh are frozen and flagged") {
    const ProblemSpec p = problem_by_name("rotating");
    std::vector<Vec2> seeds = default_seeds(p, 3);
    seeds.push_back(Vec2(10.0, 10.0));

    for (const VelocityMode mode : {VelocityMode::near_isometric, VelocityMode::normal_baseline}) {
        const TrackingResult res = run_rotating(4, mode, seeds);
        REQUIRE(res.trajectories.size() == 4);
        const Trajectory& stray = res.trajectories[3];
        CHECK(stray.lost);
        CHECK(stray.exit_step >= 0);
        for (const Vec2& pos : stray.positions) {
            CHECK(pos == Vec2(10.0, 10.0));
        }
        for (int i = 0; i < 3; ++i) CHECK_FALSE(res.trajectories[i].lost);
        CHECK(tracking_metrics(res, *p.level_set).lost == 1);
    }
}

TEST_CASE("drift does not grow under mesh refinement") {
    const ProblemSpec p = problem_by_name("deforming-regular");
    const std::vector<Vec2> seeds = default_seeds(p, 8);

    std::vector<double> drifts;
    for (const int level : {1, 2}) {
        TrackingOptions opts;
        opts.steps = 8;
        opts.t_end = 0.2; // the weak-gradient band already reaches the annulus
        opts.solve.k = 1;
        opts.solve.level = level;
        opts.solve.policy = DegeneracyPolicy::warn;
        const TrackingResult res = track(p, opts, seeds);
        drifts.push_back(tracking_metrics(res, *p.level_set).max_drift);
    }
    CHECK(drifts[1] <= 1.15 * drifts[0]);
}

TEST_CASE("near-isometric tracking distorts less than the normal flow") {
    const ProblemSpec p = problem_by_name("rotating");
    const std::vector<Vec2> seeds = default_seeds(p, 10);

    const TrackingResult iso = run_rotating(16, VelocityMode::near_isometric, seeds);
    const TrackingResult base = run_rotating(16, VelocityMode::normal_baseline, seeds);
    const TrackingMetrics m_iso = tracking_metrics(iso, *p.level_set);
    const TrackingMetrics m_base = tracking_metrics(base, *p.level_set);

    REQUIRE(m_iso.distortion.size() == iso.times.size());
    CHECK(m_iso.distortion.back() < 0.02);
    CHECK(m_base.distortion.back() > m_iso.distortion.back());

    write_trajectories_csv(iso, "traj_test.csv");
    {
        std::ifstream in("traj_test.csv");
        REQUIRE(in.good());
        std::string line;
        int rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 1 + 10 * 17); // header + seeds x (steps+1)
    }
    std::remove("traj_test.csv");

    write_metrics_csv(iso.times, &m_iso, nullptr, "metrics_test.csv");
    {
        std::ifstream in("metrics_test.csv");
        REQUIRE(in.good());
        std::stringstream ss;
        ss << in.rdbuf();
        CHECK(ss.str().find("na") != std::string::npos);
        CHECK(ss.str().find("distortion_iso") != std::string::npos);
    }
    std::remove("metrics_test.csv");
}

} // TEST_SUITE
