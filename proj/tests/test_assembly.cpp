#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "akvf/assembly.hpp"
#include "akvf/fespace.hpp"
#include "akvf/mesh.hpp"
#include "akvf/problems.hpp"
#include "akvf/quadrature.hpp"

using namespace akvf;

namespace {

// constant-direction field with z = x, so b(mu, v) = (mu, v_1)_1
FieldSpec linear_field() {
    FieldSpec f;
    f.zhat = [](const Vec2&, double) { return Vec2(1, 0); };
    f.grad_zhat = [](const Vec2&, double) { return Mat2::Zero().eval(); };
    f.z = [](const Vec2& x, double) { return x.x(); };
    f.grad_z = [](const Vec2&, double) { return Vec2(1, 0); };
    return f;
}

double max_abs(const SpMat& m) {
    double v = 0;
    for (int o = 0; o < m.outerSize(); ++o)
        for (SpMat::InnerIterator it(m, o); it; ++it) v = std::max(v, std::abs(it.value()));
    return v;
}

} // namespace

TEST_SUITE("assembly") {

TEST_CASE("symmetric forms have tiny symmetry defect") {
    const Mesh m = refine_uniform(generate_mesh(DomainSpec::square_minus_disc(4.0 / 3.0, 0.2), 1.0), 1);
    for (int k = 1; k <= 3; ++k) {
        const FESpace vspace = build_space(m, k, 2);
        const FESpace sspace = build_space(m, k, 1);
        const QuadratureRule rule = triangle_rule(2 * k);
        for (const SparseMatrix& X : {assemble_strain(vspace, rule), assemble_h1(sspace, rule),
                                      assemble_h1(vspace, rule)}) {
            CHECK(X.symmetric);
            CHECK(X.symmetry_defect() <= 1e-12 * max_abs(X.mat));
        }
    }
}

TEST_CASE("strain form is positive semidefinite") {
    const Mesh m = refine_uniform(generate_mesh(DomainSpec::square(4.0 / 3.0), 1.0), 2);
    const FESpace vspace = build_space(m, 2, 2);
    const QuadratureRule rule = triangle_rule(4);
    const SparseMatrix A = assemble_strain(vspace, rule);
    const SparseMatrix Mv = assemble_h1(vspace, rule);

    std::mt19937 rng(47);
    std::normal_distribution<double> gauss;
    for (int it = 0; it < 100; ++it) {
        Vector v(vspace.ndof());
        for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
        const double av = v.dot(A.mat * v);
        const double mv = v.dot(Mv.mat * v);
        CHECK(av >= -1e-10 * mv);
    }
}

TEST_CASE("exact values on the unit square") {
    // centered unit square, area 1
    const Mesh m = refine_uniform(generate_mesh(DomainSpec::square(0.5), 0.5), 1);
    for (int k = 1; k <= 3; ++k) {
        const FESpace vspace = build_space(m, k, 2);
        const FESpace sspace = build_space(m, k, 1);
        const QuadratureRule rule = triangle_rule(2 * k);

        // v = (x, 0): E(v) = diag(2, 0), a(v, v) = 4 |Omega|
        const SparseMatrix A = assemble_strain(vspace, rule);
        const Vector vx = interpolate(vspace, [](const Vec2& p) { return Vec2(p.x(), 0); });
        CHECK(vx.dot(A.mat * vx) == doctest::Approx(4.0).epsilon(1e-12));

        // H1 products of low-order polynomials
        const SparseMatrix M1 = assemble_h1(sspace, rule);
        const Vector one = interpolate(sspace, [](const Vec2&) { return 1.0; });
        const Vector xs = interpolate(sspace, [](const Vec2& p) { return p.x(); });
        CHECK(one.dot(M1.mat * one) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(xs.dot(M1.mat * xs) == doctest::Approx(13.0 / 12.0).epsilon(1e-13));
        CHECK(std::abs(one.dot(M1.mat * xs)) <= 1e-13);

        // b(mu, v) = (mu, v . zhat)_1 for the linear field
        const SparseMatrix B = assemble_b(sspace, vspace, linear_field(), 0.0, rule);
        CHECK(xs.dot(B.mat * vx) == doctest::Approx(13.0 / 12.0).epsilon(1e-13));
        const Vector vy = interpolate(vspace, [](const Vec2& p) { return Vec2(0, p.y()); });
        CHECK(std::abs(xs.dot(B.mat * vy)) <= 1e-13);
    }
}

TEST_CASE("rigid motions are in the null space of A") {
    const Mesh m =
        refine_uniform(generate_mesh(DomainSpec::square_minus_disc(4.0 / 3.0, 0.2), 1.0), 1);
    for (int k = 1; k <= 3; ++k) {
        const FESpace vspace = build_space(m, k, 2);
        const QuadratureRule rule = triangle_rule(2 * k);
        const SparseMatrix A = assemble_strain(vspace, rule);
        const double amax = max_abs(A.mat);

        const Vector w1 = interpolate(vspace, [](const Vec2&) { return Vec2(1, 0); });
        const Vector w2 = interpolate(vspace, [](const Vec2&) { return Vec2(0, 1); });
        const Vector w3 = interpolate(vspace, [](const Vec2& p) { return Vec2(-p.y(), p.x()); });
        for (const Vector& w : {w1, w2, w3})
            CHECK((A.mat * w).cwiseAbs().maxCoeff() <= 1e-11 * amax);
    }
}

TEST_CASE("element matrices match a higher-order rule") {
    const Mesh m = generate_mesh(DomainSpec::square_minus_disc(4.0 / 3.0, 0.2), 1.0);
    const QuadratureRule fine = triangle_rule(max_quadrature_order());
    for (int k = 1; k <= 3; ++k) {
        const QuadratureRule rule = triangle_rule(2 * k);
        for (int t = 0; t < m.num_triangles(); t += 3) {
            const Eigen::MatrixXd S = element_strain(m, t, k, rule);
            const Eigen::MatrixXd Sf = element_strain(m, t, k, fine);
            CHECK((S - Sf).norm() <= 1e-13 * (1 + Sf.norm()));

            const Eigen::MatrixXd H = element_h1(m, t, k, 1, rule);
            const Eigen::MatrixXd Hf = element_h1(m, t, k, 1, fine);
            CHECK((H - Hf).norm() <= 1e-13 * (1 + Hf.norm()));
        }
    }
}

TEST_CASE("quadrature boost leaves polynomial integrands unchanged") {
    const Mesh m = refine_uniform(generate_mesh(DomainSpec::square(4.0 / 3.0), 1.0), 1);
    const FESpace vspace = build_space(m, 2, 2);
    const SparseMatrix A0 = assemble_strain(vspace, triangle_rule(4));
    const SparseMatrix A2 = assemble_strain(vspace, triangle_rule(6));
    CHECK(max_abs((A0.mat - A2.mat).pruned()) <= 1e-13 * max_abs(A0.mat));

    // non-polynomial zhat: the rule must matter
    const ProblemSpec rot = problem_by_name("rotating");
    const FieldSpec field = rot.make_field(DegeneracyPolicy::fail, nullptr);
    const Mesh ma = refine_uniform(generate_mesh(rot.domain, 1.0), 1);
    const FESpace va = build_space(ma, 2, 2);
    const FESpace sspace = build_space(ma, 2, 1);
    const SparseMatrix B0 = assemble_b(sspace, va, field, 0.0, triangle_rule(4));
    const SparseMatrix B2 = assemble_b(sspace, va, field, 0.0, triangle_rule(6));
    CHECK(max_abs((B0.mat - B2.mat).pruned()) > 0);
}

TEST_CASE("rhs against the matrix product oracle") {
    const Mesh m = refine_uniform(generate_mesh(DomainSpec::square(0.5), 0.5), 1);
    const FESpace vspace = build_space(m, 2, 2);
    const FESpace sspace = build_space(m, 2, 1);
    const QuadratureRule rule = triangle_rule(4);
    const FieldSpec field = linear_field();

    // z in P1: g_i = (mu_i, z)_1 = (M1 c_z)_i with c_z the interpolant of z
    const SparseMatrix M1 = assemble_h1(sspace, rule);
    const Vector cz = interpolate(sspace, [](const Vec2& p) { return p.x(); });
    const Vector czv = interpolate(vspace, [](const Vec2& p) { return Vec2(p.x(), 0); });
    const SparseMatrix Mv = assemble_h1(vspace, rule);

    const Vector probe = interpolate(vspace, [](const Vec2& p) { return Vec2(p.y(), p.x()); });
    const RhsData data = assemble_rhs(sspace, vspace, field, 0.0, rule, {probe});
    REQUIRE(data.g.size() == sspace.ndof());
    CHECK((data.g - M1.mat * cz).cwiseAbs().maxCoeff() <= 1e-13 * data.g.cwiseAbs().maxCoeff());
    REQUIRE(data.z_h1.size() == 1);
    CHECK(data.z_h1[0] == doctest::Approx(probe.dot(Mv.mat * czv)).epsilon(1e-12));
}

TEST_CASE("matrix export is coordinate text") {
    const Mesh m = generate_mesh(DomainSpec::square(0.5), 0.5);
    const FESpace sspace = build_space(m, 1, 1);
    const SparseMatrix M1 = assemble_h1(sspace, triangle_rule(2));
    const std::string path = "m1_export.txt";
    write_matrix(M1, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    int rows = 0, cols = 0;
    long nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == sspace.ndof());
    CHECK(cols == sspace.ndof());
    CHECK(nnz > 0);
    int r = 0, c = 0;
    double v = 0;
    long count = 0;
    while (in >> r >> c >> v) {
        CHECK(r >= 0);
        CHECK(r < rows);
        CHECK(c >= 0);
        CHECK(c < cols);
        ++count;
    }
    CHECK(count == nnz);
    in.close();
    std::remove(path.c_str());
}

} // TEST_SUITE
