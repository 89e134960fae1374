#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "akvf/fespace.hpp"
#include "akvf/mesh.hpp"

using namespace akvf;

namespace {

Mesh annulus_mesh() {
    return refine_uniform(generate_mesh(DomainSpec::square_minus_disc(4.0 / 3.0, 0.2), 1.0), 1);
}

double poly(int k, const Vec2& p) {
    switch (k) {
        case 1: return 1.0 + 2.0 * p.x() - p.y();
        case 2: return p.x() * p.x() - 3.0 * p.x() * p.y() + 0.5;
        default: return p.x() * p.x() * p.x() - 2.0 * p.x() * p.y() * p.y() + p.y();
    }
}

Vec2 poly_grad(int k, const Vec2& p) {
    switch (k) {
        case 1: return {2.0, -1.0};
        case 2: return {2.0 * p.x() - 3.0 * p.y(), -3.0 * p.x()};
        default:
            return {3.0 * p.x() * p.x() - 2.0 * p.y() * p.y(), -4.0 * p.x() * p.y() + 1.0};
    }
}

} // namespace

TEST_SUITE("fespace") {

TEST_CASE("reference basis is a partition of unity") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 1; k <= 3; ++k) {
        for (int it = 0; it < 50; ++it) {
            double xi = unit(rng), eta = unit(rng);
            if (xi + eta > 1) {
                xi = 1 - xi;
                eta = 1 - eta;
            }
            BasisEval be;
            eval_ref_basis(k, xi, eta, be);
            CHECK(be.n == local_basis_size(k));
            double vsum = 0;
            Vec2 gsum = Vec2::Zero();
            for (int i = 0; i < be.n; ++i) {
                vsum += be.val[i];
                gsum += be.grad[i];
            }
            CHECK(std::abs(vsum - 1.0) <= 1e-13);
            CHECK(gsum.norm() <= 1e-12);
        }
    }
}

TEST_CASE("dof bookkeeping") {
    const Mesh m = annulus_mesh();
    for (int k = 1; k <= 3; ++k) {
        const FESpace s = build_space(m, k, 1);
        const FESpace v = build_space(m, k, 2);
        CHECK(s.nloc == local_basis_size(k));
        CHECK(v.ndof() == 2 * s.ndof());
        CHECK(static_cast<int>(s.dof_points.size()) == s.ndof_scalar);
        CHECK(static_cast<int>(s.elem_dofs.size()) == m.num_triangles() * s.nloc);
        for (int d : s.elem_dofs) {
            CHECK(d >= 0);
            CHECK(d < s.ndof_scalar);
        }
    }
}

TEST_CASE("degree-k polynomials are reproduced exactly") {
    const Mesh m = annulus_mesh();
    const PointLocator locator(m);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> box(-4.0 / 3.0, 4.0 / 3.0);

    for (int k = 1; k <= 3; ++k) {
        const FESpace space = build_space(m, k, 1);
        const Vector coeffs = interpolate(space, [k](const Vec2& p) { return poly(k, p); });
        int checked = 0;
        while (checked < 100) {
            const Vec2 p(box(rng), box(rng));
            const Location loc = locator.locate(p);
            if (!loc.found()) continue;
            ++checked;
            CHECK(std::abs(eval_scalar(space, coeffs, loc) - poly(k, p)) <= 1e-12);
            CHECK((eval_scalar_grad(space, coeffs, loc) - poly_grad(k, p)).norm() <= 1e-11);
        }
    }
}

TEST_CASE("interpolation is a projection") {
    const Mesh m = annulus_mesh();
    const PointLocator locator(m);
    for (int k = 1; k <= 3; ++k) {
        const FESpace space = build_space(m, k, 1);
        std::mt19937 rng(17 + k);
        std::normal_distribution<double> gauss;
        Vector coeffs(space.ndof());
        for (int i = 0; i < coeffs.size(); ++i) coeffs[i] = gauss(rng);

        const Vector again = interpolate(space, [&](const Vec2& p) {
            return eval_scalar(space, coeffs, locator.locate(p, 1e-8));
        });
        CHECK((again - coeffs).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("evaluation is continuous across shared edges") {
    const Mesh m = annulus_mesh();
    for (int k = 1; k <= 3; ++k) {
        const FESpace space = build_space(m, k, 1);
        std::mt19937 rng(19 + k);
        std::normal_distribution<double> gauss;
        Vector coeffs(space.ndof());
        for (int i = 0; i < coeffs.size(); ++i) coeffs[i] = gauss(rng);

        // collect the two triangles adjacent to every interior edge
        std::map<std::pair<int, int>, std::vector<int>> edges;
        for (int t = 0; t < m.num_triangles(); ++t) {
            for (int e = 0; e < 3; ++e) {
                int a = m.triangles[t][e], b = m.triangles[t][(e + 1) % 3];
                if (a > b) std::swap(a, b);
                edges[{a, b}].push_back(t);
            }
        }

        const PointLocator locator(m);
        const double samples[3] = {0.21, 0.5, 0.83};
        for (const auto& [verts, tris] : edges) {
            if (tris.size() != 2) continue;
            const Vec2 pa = m.vertices[verts.first], pb = m.vertices[verts.second];
            for (double s : samples) {
                const Vec2 p = pa + s * (pb - pa);
                double vals[2];
                for (int side = 0; side < 2; ++side) {
                    Location loc;
                    loc.tri = tris[side];
                    // barycentric coordinates of p in this triangle
                    const auto& tv = m.triangles[tris[side]];
                    const Mat2 J = m.jacobian(tris[side]);
                    const Vec2 rel = p - m.vertices[tv[0]];
                    const Vec2 ref = J.inverse() * rel;
                    loc.bary = {1 - ref.x() - ref.y(), ref.x(), ref.y()};
                    vals[side] = eval_scalar(space, coeffs, loc);
                }
                CHECK(std::abs(vals[0] - vals[1]) <= 1e-12 * (1 + std::abs(vals[0])));
            }
        }
    }
}

TEST_CASE("vector interpolation and evaluation") {
    const Mesh m = annulus_mesh();
    const PointLocator locator(m);
    auto f = [](const Vec2& p) { return Vec2(p.x() * p.x() - p.y(), 2.0 * p.x() * p.y()); };
    auto fgrad = [](const Vec2& p) {
        Mat2 g;
        g << 2.0 * p.x(), -1.0, 2.0 * p.y(), 2.0 * p.x();
        return g;
    };

    const FESpace vspace = build_space(m, 2, 2);
    const Vector coeffs = interpolate(vspace, f);
    CHECK(coeffs.size() == vspace.ndof());

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> box(-4.0 / 3.0, 4.0 / 3.0);
    int checked = 0;
    while (checked < 100) {
        const Vec2 p(box(rng), box(rng));
        const Location loc = locator.locate(p);
        if (!loc.found()) continue;
        ++checked;
        CHECK((eval_vector(vspace, coeffs, loc) - f(p)).norm() <= 1e-12);
        CHECK((eval_vector_grad(vspace, coeffs, loc) - fgrad(p)).norm() <= 1e-11);
    }
}

} // TEST_SUITE
