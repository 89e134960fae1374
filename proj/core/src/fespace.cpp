#include "akvf/fespace.hpp"

#include <map>
#include <stdexcept>

namespace akvf {

int local_basis_size(int k) { return (k + 1) * (k + 2) / 2; }

void eval_ref_basis(int k, double xi, double eta, BasisEval& out) {
    const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
    const Vec2 g0(-1, -1), g1(1, 0), g2(0, 1); // gradients of barycentrics
    const double l[3] = {l0, l1, l2};
    const Vec2 g[3] = {g0, g1, g2};
    out.n = local_basis_size(k);
    switch (k) {
        case 1:
            for (int i = 0; i < 3; ++i) {
                out.val[i] = l[i];
                out.grad[i] = g[i];
            }
            return;
        case 2: {
            for (int i = 0; i < 3; ++i) {
                out.val[i] = l[i] * (2 * l[i] - 1);
                out.grad[i] = (4 * l[i] - 1) * g[i];
            }
            const int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
            for (int e = 0; e < 3; ++e) {
                const int i = ea[e], j = eb[e];
                out.val[3 + e] = 4 * l[i] * l[j];
                out.grad[3 + e] = 4 * (l[j] * g[i] + l[i] * g[j]);
            }
            return;
        }
        case 3: {
            for (int i = 0; i < 3; ++i) {
                out.val[i] = 0.5 * l[i] * (3 * l[i] - 1) * (3 * l[i] - 2);
                out.grad[i] = 0.5 * (27 * l[i] * l[i] - 18 * l[i] + 2) * g[i];
            }
            // two nodes per edge: first the one nearer the edge's first vertex
            const int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
            for (int e = 0; e < 3; ++e) {
                const int i = ea[e], j = eb[e];
                out.val[3 + 2 * e] = 4.5 * l[i] * l[j] * (3 * l[i] - 1);
                out.grad[3 + 2 * e] =
                    4.5 * ((l[j] * (6 * l[i] - 1)) * g[i] + (l[i] * (3 * l[i] - 1)) * g[j]);
                out.val[3 + 2 * e + 1] = 4.5 * l[i] * l[j] * (3 * l[j] - 1);
                out.grad[3 + 2 * e + 1] =
                    4.5 * ((l[j] * (3 * l[j] - 1)) * g[i] + (l[i] * (6 * l[j] - 1)) * g[j]);
            }
            out.val[9] = 27 * l0 * l1 * l2;
            out.grad[9] = 27 * (l1 * l2 * g0 + l0 * l2 * g1 + l0 * l1 * g2);
            return;
        }
    }
    throw std::invalid_argument("eval_ref_basis: degree must be 1, 2 or 3");
}

FESpace build_space(const Mesh& mesh, int k, int components) {
    if (k < 1 || k > 3) throw std::invalid_argument("build_space: degree must be 1, 2 or 3");
    if (components != 1 && components != 2)
        throw std::invalid_argument("build_space: components must be 1 or 2");

    FESpace sp;
    sp.mesh = &mesh;
    sp.k = k;
    sp.components = components;
    sp.nloc = local_basis_size(k);

    const int nv = mesh.num_vertices();
    const int nt = mesh.num_triangles();
    const int per_edge = k - 1;

    // global edge enumeration, keyed by sorted vertex pair
    std::map<long long, int> edge_id;
    auto edge_of = [&](int a, int b) {
        long long key = (static_cast<long long>(std::min(a, b)) << 32) |
                        static_cast<unsigned int>(std::max(a, b));
        auto [it, inserted] = edge_id.emplace(key, static_cast<int>(edge_id.size()));
        return it->second;
    };

    sp.elem_dofs.assign(static_cast<size_t>(nt) * sp.nloc, -1);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        int* d = sp.elem_dofs.data() + static_cast<size_t>(t) * sp.nloc;
        for (int i = 0; i < 3; ++i) d[i] = tri[i];
        if (per_edge > 0) {
            const int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
            for (int e = 0; e < 3; ++e) {
                const int a = tri[ea[e]], b = tri[eb[e]];
                const int ge = edge_of(a, b);
                for (int q = 0; q < per_edge; ++q) {
                    // edge dofs stored along the ascending-vertex direction
                    const int slot = (a < b) ? q : per_edge - 1 - q;
                    d[3 + per_edge * e + q] = nv + per_edge * ge + slot;
                }
            }
        }
    }
    const int ne = static_cast<int>(edge_id.size());
    const int interior = (k == 3) ? 1 : 0;
    for (int t = 0; t < nt; ++t) {
        if (interior)
            sp.elem_dofs[static_cast<size_t>(t) * sp.nloc + sp.nloc - 1] = nv + per_edge * ne + t;
    }
    sp.ndof_scalar = nv + per_edge * ne + interior * nt;

    // nodal points: evaluate the reference node positions per element
    sp.dof_points.assign(sp.ndof_scalar, Vec2(0, 0));
    std::vector<Vec2> ref_nodes(sp.nloc);
    ref_nodes[0] = Vec2(0, 0);
    ref_nodes[1] = Vec2(1, 0);
    ref_nodes[2] = Vec2(0, 1);
    if (k >= 2) {
        const Vec2 corners[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
        const int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
        for (int e = 0; e < 3; ++e) {
            for (int q = 0; q < per_edge; ++q) {
                const double s = static_cast<double>(q + 1) / k;
                ref_nodes[3 + per_edge * e + q] =
                    (1.0 - s) * corners[ea[e]] + s * corners[eb[e]];
            }
        }
        if (k == 3) ref_nodes[9] = Vec2(1.0 / 3.0, 1.0 / 3.0);
    }
    for (int t = 0; t < nt; ++t) {
        const int* d = sp.dofs(t);
        for (int i = 0; i < sp.nloc; ++i)
            sp.dof_points[d[i]] = mesh.map_to_physical(t, ref_nodes[i].x(), ref_nodes[i].y());
    }
    return sp;
}

Vector interpolate(const FESpace& space, const std::function<double(const Vec2&)>& f) {
    if (space.components != 1)
        throw std::invalid_argument("interpolate: scalar function on a vector space");
    Vector c(space.ndof());
    for (int i = 0; i < space.ndof_scalar; ++i) c[i] = f(space.dof_points[i]);
    return c;
}

Vector interpolate(const FESpace& space, const std::function<Vec2(const Vec2&)>& f) {
    if (space.components != 2)
        throw std::invalid_argument("interpolate: vector function on a scalar space");
    Vector c(space.ndof());
    for (int i = 0; i < space.ndof_scalar; ++i) {
        const Vec2 v = f(space.dof_points[i]);
        c[2 * i] = v.x();
        c[2 * i + 1] = v.y();
    }
    return c;
}

namespace {

void physical_basis(const FESpace& space, const Location& loc, BasisEval& be, Mat2& jinv_t) {
    eval_ref_basis(space.k, loc.bary[1], loc.bary[2], be);
    const Mat2 J = space.mesh->jacobian(loc.tri);
    jinv_t = J.inverse().transpose();
}

} // namespace

double eval_scalar(const FESpace& space, const Vector& coeffs, const Location& loc) {
    BasisEval be;
    Mat2 jinv_t;
    physical_basis(space, loc, be, jinv_t);
    const int* d = space.dofs(loc.tri);
    double v = 0;
    for (int i = 0; i < be.n; ++i) v += coeffs[d[i]] * be.val[i];
    return v;
}

Vec2 eval_scalar_grad(const FESpace& space, const Vector& coeffs, const Location& loc) {
    BasisEval be;
    Mat2 jinv_t;
    physical_basis(space, loc, be, jinv_t);
    const int* d = space.dofs(loc.tri);
    Vec2 g(0, 0);
    for (int i = 0; i < be.n; ++i) g += coeffs[d[i]] * (jinv_t * be.grad[i]);
    return g;
}

Vec2 eval_vector(const FESpace& space, const Vector& coeffs, const Location& loc) {
    BasisEval be;
    Mat2 jinv_t;
    physical_basis(space, loc, be, jinv_t);
    const int* d = space.dofs(loc.tri);
    Vec2 v(0, 0);
    for (int i = 0; i < be.n; ++i) {
        v.x() += coeffs[2 * d[i]] * be.val[i];
        v.y() += coeffs[2 * d[i] + 1] * be.val[i];
    }
    return v;
}

Mat2 eval_vector_grad(const FESpace& space, const Vector& coeffs, const Location& loc) {
    BasisEval be;
    Mat2 jinv_t;
    physical_basis(space, loc, be, jinv_t);
    const int* d = space.dofs(loc.tri);
    Mat2 g = Mat2::Zero();
    for (int i = 0; i < be.n; ++i) {
        const Vec2 gi = jinv_t * be.grad[i];
        g.row(0) += coeffs[2 * d[i]] * gi.transpose();
        g.row(1) += coeffs[2 * d[i] + 1] * gi.transpose();
    }
    return g;
}

} // namespace akvf
