#include "akvf/assembly.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace akvf {

namespace {

// Reference basis evaluations cached at the quadrature points.
std::vector<BasisEval> tabulate(int k, const QuadratureRule& rule) {
    std::vector<BasisEval> tab(rule.size());
    for (int q = 0; q < rule.size(); ++q)
        eval_ref_basis(k, rule.points[q].x(), rule.points[q].y(), tab[q]);
    return tab;
}

struct ElementGeometry {
    Mat2 jinv_t;
    double detj;
};

ElementGeometry element_geometry(const Mesh& mesh, int tri) {
    const Mat2 J = mesh.jacobian(tri);
    const double detj = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    if (detj <= 0) throw std::runtime_error("assembly: non-positive element Jacobian");
    Mat2 jinv_t;
    jinv_t << J(1, 1), -J(1, 0), -J(0, 1), J(0, 0);
    jinv_t /= detj;
    return {jinv_t, detj};
}

Eigen::MatrixXd element_strain_impl(const Mesh& mesh, int tri, const std::vector<BasisEval>& tab,
                                    const QuadratureRule& rule) {
    const auto geo = element_geometry(mesh, tri);
    const int n = tab[0].n;
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    std::vector<Vec2> g(n);
    for (int q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q] * geo.detj;
        for (int i = 0; i < n; ++i) g[i] = geo.jinv_t * tab[q].grad[i];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double gij = g[i].dot(g[j]);
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d)
                        ke(2 * i + c, 2 * j + d) +=
                            w * 2.0 * ((c == d ? gij : 0.0) + g[i][d] * g[j][c]);
            }
        }
    }
    return ke;
}

Eigen::MatrixXd element_h1_impl(const Mesh& mesh, int tri, const std::vector<BasisEval>& tab,
                                const QuadratureRule& rule, int components) {
    const auto geo = element_geometry(mesh, tri);
    const int n = tab[0].n;
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(n, n);
    std::vector<Vec2> g(n);
    for (int q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q] * geo.detj;
        for (int i = 0; i < n; ++i) g[i] = geo.jinv_t * tab[q].grad[i];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                ke(i, j) += w * (g[i].dot(g[j]) + tab[q].val[i] * tab[q].val[j]);
    }
    if (components == 1) return ke;
    Eigen::MatrixXd kv = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < 2; ++c) kv(2 * i + c, 2 * j + c) = ke(i, j);
    return kv;
}

SparseMatrix from_triplets(int rows, int cols, std::vector<Eigen::Triplet<double>>& trip,
                           bool symmetric) {
    SparseMatrix m;
    m.mat.resize(rows, cols);
    m.mat.setFromTriplets(trip.begin(), trip.end());
    m.symmetric = symmetric;
    m.prune_tiny();
    return m;
}

} // namespace

void SparseMatrix::prune_tiny() {
    mat.prune([](int, int, double v) { return std::abs(v) >= 1e-300; });
    mat.makeCompressed();
}

double SparseMatrix::symmetry_defect() const {
    const SpMat diff = SpMat(mat.transpose()) - mat;
    double worst = 0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return worst;
}

SparseMatrix assemble_strain(const FESpace& vspace, const QuadratureRule& rule) {
    if (vspace.components != 2)
        throw std::invalid_argument("assemble_strain: requires a vector space");
    const auto tab = tabulate(vspace.k, rule);
    const Mesh& mesh = *vspace.mesh;
    const int n = vspace.nloc;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.num_triangles()) * 4 * n * n);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::MatrixXd ke = element_strain_impl(mesh, t, tab, rule);
        const int* d = vspace.dofs(t);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int c = 0; c < 2; ++c)
                    for (int e = 0; e < 2; ++e)
                        trip.emplace_back(2 * d[i] + c, 2 * d[j] + e, ke(2 * i + c, 2 * j + e));
    }
    return from_triplets(vspace.ndof(), vspace.ndof(), trip, true);
}

SparseMatrix assemble_h1(const FESpace& space, const QuadratureRule& rule) {
    const auto tab = tabulate(space.k, rule);
    const Mesh& mesh = *space.mesh;
    const int n = space.nloc;
    const int comp = space.components;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.num_triangles()) * comp * n * n);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::MatrixXd ke = element_h1_impl(mesh, t, tab, rule, 1);
        const int* d = space.dofs(t);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int c = 0; c < comp; ++c)
                    trip.emplace_back(comp * d[i] + c, comp * d[j] + c, ke(i, j));
    }
    return from_triplets(space.ndof(), space.ndof(), trip, true);
}

SparseMatrix assemble_b(const FESpace& sspace, const FESpace& vspace, const FieldSpec& field,
                        double t, const QuadratureRule& rule) {
    if (sspace.mesh != vspace.mesh)
        throw std::invalid_argument("assemble_b: spaces must share a mesh");
    if (sspace.components != 1 || vspace.components != 2)
        throw std::invalid_argument("assemble_b: need scalar rows and vector columns");
    const auto stab = tabulate(sspace.k, rule);
    const auto vtab = tabulate(vspace.k, rule);
    const Mesh& mesh = *sspace.mesh;
    const int ns = sspace.nloc, nv = vspace.nloc;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.num_triangles()) * ns * 2 * nv);
    Eigen::MatrixXd ke(ns, 2 * nv);
    std::vector<Vec2> gs(ns), gv(nv);
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        const auto geo = element_geometry(mesh, tri);
        ke.setZero();
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[q] * geo.detj;
            const Vec2 x = mesh.map_to_physical(tri, rule.points[q].x(), rule.points[q].y());
            const Vec2 zh = field.zhat(x, t);
            const Mat2 gz = field.grad_zhat(x, t);
            for (int i = 0; i < ns; ++i) gs[i] = geo.jinv_t * stab[q].grad[i];
            for (int j = 0; j < nv; ++j) gv[j] = geo.jinv_t * vtab[q].grad[j];
            for (int j = 0; j < nv; ++j) {
                const double nj = vtab[q].val[j];
                for (int c = 0; c < 2; ++c) {
                    // grad(v . zhat) for v = N_j e_c
                    const Vec2 gvz = zh[c] * gv[j] + nj * gz.row(c).transpose();
                    const double vz = nj * zh[c];
                    for (int i = 0; i < ns; ++i)
                        ke(i, 2 * j + c) += w * (gs[i].dot(gvz) + stab[q].val[i] * vz);
                }
            }
        }
        const int* ds = sspace.dofs(tri);
        const int* dv = vspace.dofs(tri);
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < nv; ++j)
                for (int c = 0; c < 2; ++c)
                    trip.emplace_back(ds[i], 2 * dv[j] + c, ke(i, 2 * j + c));
    }
    return from_triplets(sspace.ndof(), vspace.ndof(), trip, false);
}

RhsData assemble_rhs(const FESpace& sspace, const FESpace& vspace, const FieldSpec& field,
                     double t, const QuadratureRule& rule,
                     const std::vector<Vector>& kernel_fields) {
    const auto stab = tabulate(sspace.k, rule);
    const auto vtab = tabulate(vspace.k, rule);
    const Mesh& mesh = *sspace.mesh;
    const int ns = sspace.nloc, nv = vspace.nloc;
    RhsData rhs;
    rhs.g = Vector::Zero(sspace.ndof());
    rhs.z_h1.assign(kernel_fields.size(), 0.0);
    std::vector<Vec2> gs(ns), gv(nv);
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        const auto geo = element_geometry(mesh, tri);
        const int* ds = sspace.dofs(tri);
        const int* dv = vspace.dofs(tri);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[q] * geo.detj;
            const Vec2 x = mesh.map_to_physical(tri, rule.points[q].x(), rule.points[q].y());
            const double zq = field.z(x, t);
            const Vec2 gzq = field.grad_z(x, t);
            for (int i = 0; i < ns; ++i) {
                gs[i] = geo.jinv_t * stab[q].grad[i];
                rhs.g[ds[i]] += w * (gs[i].dot(gzq) + stab[q].val[i] * zq);
            }
            if (!kernel_fields.empty()) {
                const Vec2 zv = field.zvec(x, t);
                const Mat2 gzv = field.grad_zvec(x, t);
                for (int j = 0; j < nv; ++j) gv[j] = geo.jinv_t * vtab[q].grad[j];
                for (size_t kf = 0; kf < kernel_fields.size(); ++kf) {
                    const Vector& wc = kernel_fields[kf];
                    Vec2 wval(0, 0);
                    Mat2 wgrad = Mat2::Zero();
                    for (int j = 0; j < nv; ++j) {
                        const double cx = wc[2 * dv[j]], cy = wc[2 * dv[j] + 1];
                        wval.x() += cx * vtab[q].val[j];
                        wval.y() += cy * vtab[q].val[j];
                        wgrad.row(0) += cx * gv[j].transpose();
                        wgrad.row(1) += cy * gv[j].transpose();
                    }
                    rhs.z_h1[kf] += w * (gzv.cwiseProduct(wgrad).sum() + zv.dot(wval));
                }
            }
        }
    }
    return rhs;
}

Eigen::MatrixXd element_strain(const Mesh& mesh, int tri, int k, const QuadratureRule& rule) {
    return element_strain_impl(mesh, tri, tabulate(k, rule), rule);
}

Eigen::MatrixXd element_h1(const Mesh& mesh, int tri, int k, int components,
                           const QuadratureRule& rule) {
    return element_h1_impl(mesh, tri, tabulate(k, rule), rule, components);
}

void write_matrix(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix: cannot open " + path);
    out << m.rows() << ' ' << m.cols() << ' ' << m.mat.nonZeros() << '\n';
    char buf[96];
    for (int k = 0; k < m.mat.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m.mat, k); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()),
                          static_cast<long>(it.col()), it.value());
            out << buf;
        }
    }
}

} // namespace akvf
