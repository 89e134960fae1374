#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include "akvf/assembly.hpp"
#include "akvf/fespace.hpp"
#include "akvf/kernel.hpp"
#include "akvf/mesh.hpp"
#include <memory>

#include "akvf/problems.hpp"
#include "akvf/quadrature.hpp"

using namespace akvf;

namespace {

struct Operators {
    std::shared_ptr<Mesh> mesh;
    FESpace vspace, sspace;
    QuadratureRule rule;
    SparseMatrix A, B, M1, Mv;
    RigidBasis rigid;
};

Operators assemble(const ProblemSpec& problem, int k, int level, double t = 0.0) {
    Operators op;
    op.mesh = std::make_shared<Mesh>(
        refine_uniform(generate_mesh(problem.domain, 1.0), level));
    op.vspace = build_space(*op.mesh, k, 2);
    op.sspace = build_space(*op.mesh, k, 1);
    op.rule = triangle_rule(2 * k);
    const FieldSpec field = problem.make_field(DegeneracyPolicy::fail, nullptr);
    op.A = assemble_strain(op.vspace, op.rule);
    op.B = assemble_b(op.sspace, op.vspace, field, t, op.rule);
    op.M1 = assemble_h1(op.sspace, op.rule);
    op.Mv = assemble_h1(op.vspace, op.rule);
    op.rigid = rigid_motion_basis(op.vspace, op.rule);
    return op;
}

double l2_norm_sq(const Operators& op, const Vector& coeffs) {
    const FESpace& V = op.vspace;
    double acc = 0;
    BasisEval be;
    for (int t = 0; t < op.mesh->num_triangles(); ++t) {
        const double detj = 2.0 * op.mesh->tri_area(t);
        const int* dofs = V.dofs(t);
        for (int q = 0; q < op.rule.size(); ++q) {
            eval_ref_basis(V.k, op.rule.points[q].x(), op.rule.points[q].y(), be);
            Vec2 v = Vec2::Zero();
            for (int i = 0; i < V.nloc; ++i)
                v += be.val[i] * Vec2(coeffs[2 * dofs[i]], coeffs[2 * dofs[i] + 1]);
            acc += op.rule.weights[q] * detj * v.squaredNorm();
        }
    }
    return acc;
}

} // namespace

TEST_SUITE("kernel") {

TEST_CASE("rigid basis moments on the centered unit square") {
    const Mesh m = refine_uniform(generate_mesh(DomainSpec::square(0.5), 0.5), 1);
    const FESpace vspace = build_space(m, 2, 2);
    const RigidBasis rb = rigid_motion_basis(vspace, triangle_rule(4));
    CHECK(rb.area == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(rb.d1) <= 1e-14);
    CHECK(std::abs(rb.d2) <= 1e-14);
    // int (d1-y)^2 + (d2+x)^2 = 1/6, so the normalized rotation scales by sqrt(6)
    CHECK(rb.d3 == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("rigid fields are L2 orthonormal") {
    Operators op = assemble(problem_by_name("rotating"), 2, 1);
    for (int i = 0; i < 3; ++i) {
        CHECK(l2_norm_sq(op, op.rigid.fields[i]) == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = i + 1; j < 3; ++j) {
            // polarization: |v_i + v_j|^2 = 2 when orthonormal
            const double cross =
                l2_norm_sq(op, Vector(op.rigid.fields[i] + op.rigid.fields[j])) - 2.0;
            CHECK(std::abs(cross) <= 1e-11);
        }
    }
}

TEST_CASE("detection finds the synthetic kernel at every level") {
    const ProblemSpec p = problem_by_name("synthetic");
    for (int level = 0; level <= 3; ++level) {
        const int k = level <= 2 ? 2 : 1;
        Operators op = assemble(p, k, level);
        const KernelBasis kb = discrete_kernel(op.B, op.M1, op.Mv, op.rigid);
        REQUIRE(kb.dim == 1);

        // aligned with zhat_perp
        const Vec2 zp = p.kernel_direction;
        const Vector dir = interpolate(op.vspace, [zp](const Vec2&) { return zp; });
        const double num = std::abs(kb.fields[0].dot(op.Mv.mat * dir));
        const double den = std::sqrt(kb.fields[0].dot(op.Mv.mat * kb.fields[0]) *
                                     dir.dot(op.Mv.mat * dir));
        CHECK(num / den >= 1 - 1e-8);

        // strain-free and constraint-annihilated
        CHECK(kb.fields[0].dot(op.A.mat * kb.fields[0]) <= 1e-10);
        Eigen::SimplicialLLT<SpMat> llt(op.M1.mat);
        REQUIRE(llt.info() == Eigen::Success);
        const Vector bw = op.B.mat * kb.fields[0];
        const double dual = std::sqrt(bw.dot(llt.solve(bw)));
        const double scale = std::sqrt(std::max(1.0, kb.detection_values[2]));
        CHECK(dual <= kb.tau * scale);
    }
}

TEST_CASE("ellipse normal fields have no kernel") {
    for (const char* name : {"deforming-regular", "rotating"}) {
        const ProblemSpec p = problem_by_name(name);
        for (int level = 0; level <= 2; ++level) {
            Operators op = assemble(p, 1, level);
            const KernelBasis kb = discrete_kernel(op.B, op.M1, op.Mv, op.rigid);
            CHECK(kb.dim == 0);
        }
    }
}

TEST_CASE("threshold tau controls detection") {
    Operators op = assemble(problem_by_name("synthetic"), 1, 1);
    CHECK(discrete_kernel(op.B, op.M1, op.Mv, op.rigid, 1e-14).dim == 1);
    CHECK(discrete_kernel(op.B, op.M1, op.Mv, op.rigid, 1.0).dim == 3);
}

TEST_CASE("projection is idempotent and Mv-orthogonal") {
    Operators op = assemble(problem_by_name("synthetic"), 2, 1);
    const KernelBasis kb = discrete_kernel(op.B, op.M1, op.Mv, op.rigid);
    REQUIRE(kb.dim == 1);

    // Mv-orthonormal basis
    CHECK(kb.fields[0].dot(op.Mv.mat * kb.fields[0]) == doctest::Approx(1.0).epsilon(1e-10));

    std::mt19937 rng(53);
    std::normal_distribution<double> gauss;
    for (int it = 0; it < 10; ++it) {
        Vector u(op.vspace.ndof());
        for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
        const Vector qu = apply_projection(kb, op.Mv, u);
        const Vector qqu = apply_projection(kb, op.Mv, qu);
        const double unorm = std::sqrt(u.dot(op.Mv.mat * u));
        CHECK((qqu - qu).cwiseAbs().maxCoeff() <= 1e-11 * unorm);

        const Vector rem = u - qu;
        CHECK(std::abs(rem.dot(op.Mv.mat * kb.fields[0])) <= 1e-11 * unorm);
    }
}

TEST_CASE("pointwise rank diagnostic") {
    const Mesh m = refine_uniform(generate_mesh(DomainSpec::square(4.0 / 3.0), 1.0), 2);
    std::vector<Vec2> samples;
    for (int t = 0; t < m.num_triangles(); ++t)
        samples.push_back(m.map_to_physical(t, 1.0 / 3.0, 1.0 / 3.0));

    const ProblemSpec synth = problem_by_name("synthetic");
    const RankDiagnostic rd =
        rank_diagnostic(synth.make_field(DegeneracyPolicy::fail, nullptr), 0.0, samples);
    CHECK(rd.rank == 2);
    CHECK(rd.kernel_dim_bound == 1);

    const ProblemSpec rot = problem_by_name("rotating");
    std::vector<Vec2> away;
    for (const Vec2& s : samples)
        if (s.norm() > 0.3) away.push_back(s);
    const RankDiagnostic rd2 =
        rank_diagnostic(rot.make_field(DegeneracyPolicy::fail, nullptr), 0.0, away);
    CHECK(rd2.rank == 3);
    CHECK(rd2.kernel_dim_bound == 0);
}

} // TEST_SUITE
