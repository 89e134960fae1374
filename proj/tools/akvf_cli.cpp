#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "akvf/analysis.hpp"
#include "akvf/driver.hpp"
#include "akvf/errors.hpp"
#include "akvf/tracking.hpp"
#include "akvf/vtk_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Config {
    std::string problem = "synthetic";
    int k = 1;
    int boost = 0;
    int level = 0;
    int levels = 5;
    double h0 = 1.0;
    double tau = 1e-8;
    std::string degeneracy = "fail";
    double time = 0.0;
    std::string out = "out";
    // track block
    int steps = 60;
    double t_end = 1.0;
    int seeds = 20;
    std::string mode = "both";
    // converge block
    int reference_extra = 2;
    int quad_order = 0;
    bool prefer_exact = true;
    double clamp_tol = 1e-3;
};

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw akvf::ConfigError("unknown config key '" + where + it.key() + "'");
    }
}

template <typename T>
void load(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw akvf::ConfigError("cannot read config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw akvf::ConfigError(std::string("config parse: ") + e.what());
    }
    if (!j.is_object()) throw akvf::ConfigError("config root must be an object");
    check_keys(j, {"problem", "k", "boost", "level", "levels", "h0", "tau", "degeneracy", "time",
                   "out", "track", "converge"},
               "");
    Config c;
    try {
        load(j, "problem", c.problem);
        load(j, "k", c.k);
        load(j, "boost", c.boost);
        load(j, "level", c.level);
        load(j, "levels", c.levels);
        load(j, "h0", c.h0);
        load(j, "tau", c.tau);
        load(j, "degeneracy", c.degeneracy);
        load(j, "time", c.time);
        load(j, "out", c.out);
        if (j.contains("track")) {
            const json& t = j.at("track");
            check_keys(t, {"steps", "t_end", "seeds", "mode"}, "track.");
            load(t, "steps", c.steps);
            load(t, "t_end", c.t_end);
            load(t, "seeds", c.seeds);
            load(t, "mode", c.mode);
        }
        if (j.contains("converge")) {
            const json& t = j.at("converge");
            check_keys(t, {"reference_extra", "quad_order", "prefer_exact", "clamp_tol"},
                       "converge.");
            load(t, "reference_extra", c.reference_extra);
            load(t, "quad_order", c.quad_order);
            load(t, "prefer_exact", c.prefer_exact);
            load(t, "clamp_tol", c.clamp_tol);
        }
    } catch (const json::exception& e) {
        throw akvf::ConfigError(std::string("config value: ") + e.what());
    }
    return c;
}

akvf::DegeneracyPolicy policy_of(const Config& c) {
    if (c.degeneracy == "fail") return akvf::DegeneracyPolicy::fail;
    if (c.degeneracy == "warn") return akvf::DegeneracyPolicy::warn;
    throw akvf::ConfigError("degeneracy must be 'fail' or 'warn'");
}

akvf::SolveOptions solve_options(const Config& c) {
    akvf::SolveOptions o;
    o.k = c.k;
    o.boost = c.boost;
    o.level = c.level;
    o.h0 = c.h0;
    o.tau = c.tau;
    o.policy = policy_of(c);
    o.time = c.time;
    return o;
}

json config_json(const Config& c) {
    return json{{"problem", c.problem},
                {"k", c.k},
                {"boost", c.boost},
                {"level", c.level},
                {"levels", c.levels},
                {"h0", c.h0},
                {"tau", c.tau},
                {"degeneracy", c.degeneracy},
                {"time", c.time},
                {"out", c.out},
                {"track",
                 {{"steps", c.steps}, {"t_end", c.t_end}, {"seeds", c.seeds}, {"mode", c.mode}}},
                {"converge",
                 {{"reference_extra", c.reference_extra},
                  {"quad_order", c.quad_order},
                  {"prefer_exact", c.prefer_exact},
                  {"clamp_tol", c.clamp_tol}}}};
}

fs::path prepare_out(const Config& c) {
    fs::path dir(c.out);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const Config& c,
                    double seconds, const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                 "." + std::to_string(EIGEN_MINOR_VERSION);
    m["config"] = config_json(c);
    m["seconds"] = seconds;
    m["outputs"] = outputs;
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << "\n";
}

json diag_json(const akvf::SolveResult& r) {
    json j;
    j["h"] = r.h;
    j["ndof_u"] = r.vspace.ndof();
    j["ndof_lambda"] = r.sspace.ndof();
    j["kernel_dim"] = r.kernel.dim;
    j["kernel_detection_values"] = {r.kernel.detection_values[0], r.kernel.detection_values[1],
                                    r.kernel.detection_values[2]};
    j["tau"] = r.kernel.tau;
    j["residuals"] = {{"momentum", r.sol.res_momentum},
                      {"constraint", r.sol.res_constraint},
                      {"border", r.sol.res_border}};
    j["alpha_inf"] = r.sol.alpha.size() ? r.sol.alpha.cwiseAbs().maxCoeff() : 0.0;
    j["energy"] = r.diag.energy;
    j["lambda_h1"] = r.diag.lambda_h1;
    if (r.diag.ratio_valid)
        j["ratio"] = r.diag.ratio;
    else
        j["ratio"] = nullptr;
    j["degeneracy_violations"] = r.degeneracy.violations;
    if (r.degeneracy.violations > 0) {
        j["degeneracy_min_grad_norm"] = r.degeneracy.min_grad_norm;
        j["degeneracy_worst_point"] = {r.degeneracy.worst_point.x(), r.degeneracy.worst_point.y()};
    }
    j["timings"] = {{"mesh", r.timings.mesh},
                    {"assemble", r.timings.assemble},
                    {"kernel", r.timings.kernel},
                    {"solve", r.timings.solve},
                    {"total", r.timings.total}};
    return j;
}

int cmd_mesh(const Config& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const akvf::ProblemSpec problem = akvf::problem_by_name(c.problem);
    akvf::Mesh mesh =
        akvf::refine_uniform(akvf::generate_mesh(problem.domain, c.h0), c.level);
    const fs::path dir = prepare_out(c);
    akvf::write_mesh(mesh, (dir / "mesh.txt").string());
    akvf::write_vtk_mesh(mesh, (dir / "mesh.vtk").string());
    std::cout << "mesh: " << mesh.num_vertices() << " vertices, " << mesh.num_triangles()
              << " triangles, h = " << mesh.max_diameter()
              << ", min angle = " << mesh.min_angle_deg() << " deg\n";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, "mesh", c, secs, {"mesh.txt", "mesh.vtk"});
    return 0;
}

int cmd_solve(const Config& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const akvf::ProblemSpec problem = akvf::problem_by_name(c.problem);
    const akvf::SolveResult r = akvf::solve_problem(problem, solve_options(c));
    const fs::path dir = prepare_out(c);
    akvf::write_vtk_solution(*r.mesh, r.vspace, r.sol.u, r.sspace, r.sol.lambda,
                             (dir / "solution.vtk").string());
    json summary = diag_json(r);
    summary["problem"] = problem.name;
    summary["expected_kernel_dim"] = problem.expected_kernel_dim;
    {
        std::ofstream out(dir / "summary.json");
        out << summary.dump(2) << "\n";
    }
    std::cout << "solve: " << problem.name << " k=" << c.k << " level=" << c.level
              << " kernel_dim=" << r.kernel.dim << " energy=" << r.diag.energy
              << " lambda_h1=" << r.diag.lambda_h1 << "\n";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, "solve", c, secs, {"solution.vtk", "summary.json"});
    return 0;
}

int cmd_converge(const Config& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const akvf::ProblemSpec problem = akvf::problem_by_name(c.problem);
    akvf::StudyOptions opts;
    opts.k = c.k;
    opts.boost = c.boost;
    opts.levels = c.levels;
    opts.h0 = c.h0;
    opts.tau = c.tau;
    opts.policy = policy_of(c);
    opts.time = c.time;
    opts.reference_extra = c.reference_extra;
    opts.prefer_exact = c.prefer_exact;
    opts.clamp_tol = c.clamp_tol;
    opts.quad_order = c.quad_order;

    const akvf::StudyResult study = akvf::convergence_study(problem, opts);
    const fs::path dir = prepare_out(c);
    const std::string stem =
        problem.name + "_k" + std::to_string(c.k) + "_l" + std::to_string(c.boost);
    akvf::write_records_csv(study.records, (dir / (stem + ".csv")).string());
    akvf::write_study_json(study, problem, opts, (dir / (stem + ".json")).string());
    for (const auto& rec : study.records)
        std::cout << "level " << rec.level << "  h=" << rec.h << "  err_u_h1=" << rec.err_u_h1
                  << "  eoc=" << rec.eoc_u_h1 << "\n";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, "converge", c, secs, {stem + ".csv", stem + ".json"});
    return 0;
}

int cmd_track(const Config& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const akvf::ProblemSpec problem = akvf::problem_by_name(c.problem);
    akvf::TrackingOptions opts;
    opts.steps = c.steps;
    opts.t_end = c.t_end;
    opts.solve = solve_options(c);

    const std::vector<akvf::Vec2> seeds = akvf::default_seeds(problem, c.seeds);
    if (seeds.empty()) throw akvf::ConfigError("no seeds could be placed on the zero level");

    const bool run_iso = c.mode == "both" || c.mode == "near-isometric";
    const bool run_base = c.mode == "both" || c.mode == "baseline";
    if (!run_iso && !run_base)
        throw akvf::ConfigError("mode must be 'near-isometric', 'baseline' or 'both'");

    const fs::path dir = prepare_out(c);
    std::vector<std::string> outputs;
    std::vector<double> times;
    std::optional<akvf::TrackingMetrics> im, bm;
    if (run_iso) {
        opts.mode = akvf::VelocityMode::near_isometric;
        const akvf::TrackingResult res = akvf::track(problem, opts, seeds);
        im = akvf::tracking_metrics(res, *problem.level_set);
        akvf::write_trajectories_csv(res, (dir / "trajectories_iso.csv").string());
        outputs.push_back("trajectories_iso.csv");
        times = res.times;
        std::cout << "near-isometric: max drift " << im->max_drift << ", D(t_e) "
                  << im->distortion.back() << ", lost " << im->lost << "\n";
    }
    if (run_base) {
        opts.mode = akvf::VelocityMode::normal_baseline;
        const akvf::TrackingResult res = akvf::track(problem, opts, seeds);
        bm = akvf::tracking_metrics(res, *problem.level_set);
        akvf::write_trajectories_csv(res, (dir / "trajectories_baseline.csv").string());
        outputs.push_back("trajectories_baseline.csv");
        times = res.times;
        std::cout << "baseline: max drift " << bm->max_drift << ", D(t_e) "
                  << bm->distortion.back() << ", lost " << bm->lost << "\n";
    }
    akvf::write_metrics_csv(times, im ? &*im : nullptr, bm ? &*bm : nullptr,
                            (dir / "metrics.csv").string());
    outputs.push_back("metrics.csv");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, "track", c, secs, outputs);
    return 0;
}

int cmd_kernel(const Config& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const akvf::ProblemSpec problem = akvf::problem_by_name(c.problem);
    const akvf::SolveResult r = akvf::solve_problem(problem, solve_options(c));

    std::vector<akvf::Vec2> samples;
    samples.reserve(r.mesh->num_triangles());
    for (int t = 0; t < r.mesh->num_triangles(); ++t)
        samples.push_back(r.mesh->map_to_physical(t, 1.0 / 3.0, 1.0 / 3.0));
    const akvf::RankDiagnostic rd = akvf::rank_diagnostic(r.field, c.time, samples);

    json j;
    j["problem"] = problem.name;
    j["expected_kernel_dim"] = problem.expected_kernel_dim;
    j["detected_dim"] = r.kernel.dim;
    j["detection_values"] = {r.kernel.detection_values[0], r.kernel.detection_values[1],
                             r.kernel.detection_values[2]};
    j["tau"] = r.kernel.tau;
    j["rank_diagnostic"] = {
        {"singular_values", {rd.singular_values[0], rd.singular_values[1], rd.singular_values[2]}},
        {"rank", rd.rank},
        {"kernel_dim_bound", rd.kernel_dim_bound}};
    const fs::path dir = prepare_out(c);
    {
        std::ofstream out(dir / "kernel.json");
        out << j.dump(2) << "\n";
    }
    std::cout << "kernel: detected dim " << r.kernel.dim << " (expected "
              << problem.expected_kernel_dim << "), bound " << rd.kernel_dim_bound << "\n";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, "kernel", c, secs, {"kernel.json"});
    return 0;
}

std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") return argv[i + 1];
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

void add_common(CLI::App* sub, Config& c) {
    sub->add_option("--config", "JSON config file (flags override it)");
    sub->add_option("--problem", c.problem,
                    "synthetic | deforming-regular | deforming-corner | deforming-critical | "
                    "rotating");
    sub->add_option("--k", c.k, "polynomial degree (1..3)");
    sub->add_option("--boost", c.boost, "quadrature boost l (order 2k+l)");
    sub->add_option("--tau", c.tau, "kernel detection threshold");
    sub->add_option("--degeneracy", c.degeneracy, "fail | warn");
    sub->add_option("--h0", c.h0, "target mesh size of the level-0 mesh");
    sub->add_option("--time", c.time, "evaluation time");
    sub->add_option("--out", c.out, "output directory");
}

} // namespace

int main(int argc, char** argv) {
    Config c;
    try {
        const std::string cfg = find_config_arg(argc, argv);
        if (!cfg.empty()) c = load_config(cfg);

        CLI::App app{"Approximate Killing velocity fields on evolving level-set curves"};
        app.require_subcommand(1);
        app.set_version_flag("--version", kVersion);

        CLI::App* s_mesh = app.add_subcommand("mesh", "generate and export a mesh");
        add_common(s_mesh, c);
        s_mesh->add_option("--level", c.level, "refinement level");

        CLI::App* s_solve = app.add_subcommand("solve", "solve one saddle problem");
        add_common(s_solve, c);
        s_solve->add_option("--level", c.level, "refinement level");

        CLI::App* s_conv = app.add_subcommand("converge", "run a convergence study");
        add_common(s_conv, c);
        s_conv->add_option("--levels", c.levels, "number of study levels");
        s_conv->add_option("--reference-extra", c.reference_extra,
                           "reference levels beyond the finest study level");
        bool force_reference = false;
        s_conv->add_flag("--force-reference", force_reference,
                         "use a fine-mesh reference even when an exact solution exists");
        s_conv->callback([&] { c.prefer_exact = c.prefer_exact && !force_reference; });
        s_conv->add_option("--quad-order", c.quad_order, "error quadrature order (0 = 2k+2)");

        CLI::App* s_track = app.add_subcommand("track", "particle tracking");
        add_common(s_track, c);
        s_track->add_option("--level", c.level, "refinement level");
        s_track->add_option("--steps", c.steps, "Euler steps N");
        s_track->add_option("--t-end", c.t_end, "end time");
        s_track->add_option("--seeds", c.seeds, "number of seed particles");
        s_track->add_option("--mode", c.mode, "near-isometric | baseline | both");

        CLI::App* s_kernel = app.add_subcommand("kernel", "kernel detection report");
        add_common(s_kernel, c);
        s_kernel->add_option("--level", c.level, "refinement level");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e);
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }

        if (s_mesh->parsed()) return cmd_mesh(c);
        if (s_solve->parsed()) return cmd_solve(c);
        if (s_conv->parsed()) return cmd_converge(c);
        if (s_track->parsed()) return cmd_track(c);
        if (s_kernel->parsed()) return cmd_kernel(c);
        return 2;
    } catch (const akvf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const akvf::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const akvf::DegeneracyError& e) {
        std::cerr << "degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const akvf::SolveError& e) {
        std::cerr << "solver: " << e.what() << "\n";
        return 4;
    } catch (const akvf::EvaluationError& e) {
        std::cerr << "evaluation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
