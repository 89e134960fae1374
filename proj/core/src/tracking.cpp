#include "akvf/tracking.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "akvf/errors.hpp"

namespace akvf {

namespace {

bool domain_contains(const DomainSpec& d, const Vec2& p) {
    const double a = d.half_width;
    switch (d.kind) {
        case DomainKind::square:
            return std::abs(p.x()) <= a && std::abs(p.y()) <= a;
        case DomainKind::square_minus_disc:
            return std::abs(p.x()) <= a && std::abs(p.y()) <= a && p.norm() >= d.inner_radius;
        case DomainKind::square_minus_square:
            return std::abs(p.x()) <= a && std::abs(p.y()) <= a &&
                   std::max(std::abs(p.x()), std::abs(p.y())) >= d.inner_half_width;
        case DomainKind::external:
            return true; // geometry unknown; the mesh locator decides
    }
    return false;
}

std::string fmt17(double v) {
    if (std::isnan(v)) return "na";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::vector<Vec2> project_seeds(const LevelSetSpec& ls, const std::vector<Vec2>& raw, double t) {
    std::vector<Vec2> out;
    for (const Vec2& p0 : raw) {
        Vec2 p = p0;
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            const double f = ls.phi(p, t);
            if (std::abs(f) <= 1e-10) {
                ok = true;
                break;
            }
            const Vec2 g = ls.grad_phi(p, t);
            const double n2 = g.squaredNorm();
            if (std::sqrt(n2) < ls.c_min) break;
            p -= (f / n2) * g;
        }
        if (ok)
            out.push_back(p);
        else
            std::cerr << "seed (" << p0.x() << ", " << p0.y() << ") rejected: projection did not converge\n";
    }
    return out;
}

std::vector<Vec2> default_seeds(const ProblemSpec& problem, int count) {
    if (!problem.level_set) throw ConfigError("default_seeds: problem has no level set");
    const LevelSetSpec& ls = *problem.level_set;
    const double t = problem.t0;
    const double rmax = 1.2 * (problem.domain.half_width > 0 ? problem.domain.half_width : 2.0);

    std::vector<Vec2> raw;
    for (int j = 0; j < count; ++j) {
        const double theta = 2 * M_PI * j / count;
        const Vec2 dir(std::cos(theta), std::sin(theta));
        // bracket the zero level radially, then bisect
        double r0 = 0, r1 = rmax;
        const double f0 = ls.phi(r0 * dir, t);
        bool bracketed = false;
        for (double r = rmax / 64; r <= rmax; r += rmax / 64) {
            if (ls.phi(r * dir, t) * f0 < 0) {
                r1 = r;
                bracketed = true;
                break;
            }
            r0 = r;
        }
        if (!bracketed) continue;
        for (int it = 0; it < 80; ++it) {
            const double rm = 0.5 * (r0 + r1);
            if (ls.phi(rm * dir, t) * f0 < 0)
                r1 = rm;
            else
                r0 = rm;
        }
        raw.push_back(0.5 * (r0 + r1) * dir);
    }
    return project_seeds(ls, raw, t);
}

TrackingResult track(const ProblemSpec& problem, const TrackingOptions& opts,
                     const std::vector<Vec2>& seeds) {
    if (opts.steps < 1) throw ConfigError("track: steps must be >= 1");
    const double dt = opts.t_end / opts.steps;

    TrackingResult res;
    res.mode = opts.mode;
    res.times.resize(opts.steps + 1);
    for (int i = 0; i <= opts.steps; ++i) res.times[i] = i * dt;
    res.trajectories.resize(seeds.size());
    for (size_t s = 0; s < seeds.size(); ++s) {
        res.trajectories[s].positions.reserve(opts.steps + 1);
        res.trajectories[s].positions.push_back(seeds[s]);
    }

    if (opts.mode == VelocityMode::near_isometric) {
        ProblemSolver solver(problem, opts.solve);
        const PointLocator locator(solver.mesh());
        for (int i = 1; i <= opts.steps; ++i) {
            const double t = res.times[i];
            const ProblemSolver::Step step = solver.solve_at(t);
            for (auto& traj : res.trajectories) {
                const Vec2 prev = traj.positions.back();
                if (traj.lost) {
                    traj.positions.push_back(prev);
                    continue;
                }
                const Location loc = locator.locate(prev);
                if (!loc.found()) {
                    traj.lost = true;
                    traj.exit_step = i;
                    traj.positions.push_back(prev);
                    continue;
                }
                const Vec2 u = eval_vector(solver.vspace(), step.sol.u, loc);
                traj.positions.push_back(prev + dt * u);
            }
        }
    } else {
        if (!problem.level_set) throw ConfigError("track: baseline mode needs a level set");
        const LevelSetSpec& ls = *problem.level_set;
        for (int i = 1; i <= opts.steps; ++i) {
            const double t = res.times[i];
            for (auto& traj : res.trajectories) {
                const Vec2 prev = traj.positions.back();
                if (traj.lost) {
                    traj.positions.push_back(prev);
                    continue;
                }
                if (!domain_contains(problem.domain, prev)) {
                    traj.lost = true;
                    traj.exit_step = i;
                    traj.positions.push_back(prev);
                    continue;
                }
                const Vec2 g = ls.grad_phi(prev, t);
                const double n2 = g.squaredNorm();
                if (std::sqrt(n2) < ls.c_min) {
                    traj.lost = true;
                    traj.exit_step = i;
                    traj.positions.push_back(prev);
                    continue;
                }
                const Vec2 u = -(ls.phi_t(prev, t) / n2) * g;
                traj.positions.push_back(prev + dt * u);
            }
        }
    }
    return res;
}

TrackingMetrics tracking_metrics(const TrackingResult& result, const LevelSetSpec& ls) {
    TrackingMetrics m;
    const int nsteps = static_cast<int>(result.times.size()) - 1;
    const int ns = static_cast<int>(result.trajectories.size());
    m.drift.assign(nsteps + 1, 0.0);
    m.distortion.assign(nsteps + 1, 0.0);
    for (const auto& traj : result.trajectories)
        if (traj.lost) ++m.lost;

    auto alive_at = [&](int s, int i) {
        const auto& tr = result.trajectories[s];
        return !tr.lost || i < tr.exit_step;
    };

    for (int i = 0; i <= nsteps; ++i) {
        const double t = result.times[i];
        double worst = 0;
        for (int s = 0; s < ns; ++s) {
            if (!alive_at(s, i)) continue;
            worst = std::max(worst, std::abs(ls.phi(result.trajectories[s].positions[i], t)));
        }
        m.drift[i] = worst;
        m.max_drift = std::max(m.max_drift, worst);

        double acc = 0;
        long pairs = 0;
        for (int a = 0; a < ns; ++a) {
            if (!alive_at(a, i)) continue;
            for (int b = a + 1; b < ns; ++b) {
                if (!alive_at(b, i)) continue;
                const double d0 = (result.trajectories[a].positions[0] -
                                   result.trajectories[b].positions[0])
                                      .norm();
                const double di = (result.trajectories[a].positions[i] -
                                   result.trajectories[b].positions[i])
                                      .norm();
                acc += std::abs(di - d0);
                ++pairs;
            }
        }
        m.distortion[i] = pairs > 0 ? acc / pairs : 0.0;
    }
    return m;
}

void write_trajectories_csv(const TrackingResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "seed_id,step,t,x,y,lost\n";
    for (size_t s = 0; s < result.trajectories.size(); ++s) {
        const auto& tr = result.trajectories[s];
        for (size_t i = 0; i < tr.positions.size(); ++i) {
            const bool lost = tr.lost && static_cast<int>(i) >= tr.exit_step;
            out << s << ',' << i << ',' << fmt17(result.times[i]) << ','
                << fmt17(tr.positions[i].x()) << ',' << fmt17(tr.positions[i].y()) << ','
                << (lost ? 1 : 0) << "\n";
        }
    }
}

void write_metrics_csv(const std::vector<double>& times, const TrackingMetrics* iso,
                       const TrackingMetrics* baseline, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "step,t,drift,distortion_iso,distortion_baseline\n";
    const TrackingMetrics* drift_src = iso ? iso : baseline;
    for (size_t i = 0; i < times.size(); ++i) {
        out << i << ',' << fmt17(times[i]) << ','
            << (drift_src ? fmt17(drift_src->drift[i]) : "na") << ','
            << (iso ? fmt17(iso->distortion[i]) : "na") << ','
            << (baseline ? fmt17(baseline->distortion[i]) : "na") << "\n";
    }
}

} // namespace akvf
