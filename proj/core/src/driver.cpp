#include "akvf/driver.hpp"

#include <chrono>
#include <string>

#include "akvf/errors.hpp"

namespace akvf {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int SolveOptions::quad_order(int for_k) const {
    const int order = 2 * for_k + boost;
    if (for_k < 1 || for_k > 3) throw ConfigError("k must be 1, 2 or 3");
    if (boost < 0) throw ConfigError("quadrature boost must be nonnegative");
    if (order > max_quadrature_order())
        throw ConfigError("quadrature order " + std::to_string(order) + " exceeds the table (" +
                          std::to_string(max_quadrature_order()) + ")");
    return order;
}

SolveResult solve_problem(const ProblemSpec& problem, const SolveOptions& opts) {
    const auto t_start = std::chrono::steady_clock::now();
    SolveResult r;
    r.time = opts.time;
    r.rule = triangle_rule(opts.quad_order(opts.k)); // validates k and boost

    auto t0 = std::chrono::steady_clock::now();
    Mesh base = generate_mesh(problem.domain, opts.h0);
    r.mesh = std::make_shared<Mesh>(refine_uniform(base, opts.level));
    r.h = r.mesh->max_diameter();
    r.timings.mesh = seconds_since(t0);

    r.vspace = build_space(*r.mesh, opts.k, 2);
    r.sspace = build_space(*r.mesh, opts.k, 1);
    r.field = problem.make_field(opts.policy, &r.degeneracy);

    t0 = std::chrono::steady_clock::now();
    r.A = assemble_strain(r.vspace, r.rule);
    r.M1 = assemble_h1(r.sspace, r.rule);
    r.Mv = assemble_h1(r.vspace, r.rule);
    r.B = assemble_b(r.sspace, r.vspace, r.field, opts.time, r.rule);
    r.timings.assemble = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    r.rigid = rigid_motion_basis(r.vspace, r.rule);
    r.kernel = discrete_kernel(r.B, r.M1, r.Mv, r.rigid, opts.tau);
    r.timings.kernel = seconds_since(t0);

    r.data = assemble_rhs(r.sspace, r.vspace, r.field, opts.time, r.rule, r.kernel.fields);

    t0 = std::chrono::steady_clock::now();
    r.system = build_system(r.A, r.B, r.Mv, r.kernel, r.data.g, r.data.z_h1);
    r.sol = solve_system(r.system);
    r.timings.solve = seconds_since(t0);

    r.diag = energy_diagnostics(r.sol, r.A, r.M1);
    r.timings.total = seconds_since(t_start);
    return r;
}

ProblemSolver::ProblemSolver(const ProblemSpec& problem, const SolveOptions& opts)
    : problem_(problem), opts_(opts) {
    rule_ = triangle_rule(opts.quad_order(opts.k));
    Mesh base = generate_mesh(problem.domain, opts.h0);
    mesh_ = std::make_shared<Mesh>(refine_uniform(base, opts.level));
    vspace_ = build_space(*mesh_, opts.k, 2);
    sspace_ = build_space(*mesh_, opts.k, 1);
    field_ = problem.make_field(opts.policy, &stats_);
    A_ = assemble_strain(vspace_, rule_);
    M1_ = assemble_h1(sspace_, rule_);
    Mv_ = assemble_h1(vspace_, rule_);
    rigid_ = rigid_motion_basis(vspace_, rule_);
}

ProblemSolver::Step ProblemSolver::solve_at(double t) {
    Step s;
    s.time = t;
    const SparseMatrix B = assemble_b(sspace_, vspace_, field_, t, rule_);
    s.kernel = discrete_kernel(B, M1_, Mv_, rigid_, opts_.tau);
    const RhsData data = assemble_rhs(sspace_, vspace_, field_, t, rule_, s.kernel.fields);
    const SaddleSystem sys = build_system(A_, B, Mv_, s.kernel, data.g, data.z_h1);
    s.sol = solve_system(sys);
    s.diag = energy_diagnostics(s.sol, A_, M1_);
    return s;
}

} // namespace akvf
