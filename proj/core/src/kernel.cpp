#include "akvf/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

#include "akvf/errors.hpp"

namespace akvf {

RigidBasis rigid_motion_basis(const FESpace& vspace, const QuadratureRule& rule) {
    if (vspace.components != 2)
        throw std::invalid_argument("rigid_motion_basis: requires a vector space");
    const Mesh& mesh = *vspace.mesh;

    double area = 0, int_x = 0, int_y = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double detj = 2.0 * mesh.tri_area(t);
        for (int q = 0; q < rule.size(); ++q) {
            const Vec2 x = mesh.map_to_physical(t, rule.points[q].x(), rule.points[q].y());
            const double w = rule.weights[q] * detj;
            area += w;
            int_x += w * x.x();
            int_y += w * x.y();
        }
    }
    RigidBasis rb;
    rb.area = area;
    rb.d1 = int_y / area;
    rb.d2 = -int_x / area;
    double i3 = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double detj = 2.0 * mesh.tri_area(t);
        for (int q = 0; q < rule.size(); ++q) {
            const Vec2 x = mesh.map_to_physical(t, rule.points[q].x(), rule.points[q].y());
            const double w = rule.weights[q] * detj;
            const double rx = rb.d1 - x.y();
            const double ry = rb.d2 + x.x();
            i3 += w * (rx * rx + ry * ry);
        }
    }
    rb.d3 = 1.0 / std::sqrt(i3);

    const double s = 1.0 / std::sqrt(area);
    const int n = vspace.ndof_scalar;
    for (auto& f : rb.fields) f = Vector::Zero(2 * n);
    for (int i = 0; i < n; ++i) {
        const Vec2 p = vspace.dof_points[i];
        rb.fields[0][2 * i] = s;
        rb.fields[1][2 * i + 1] = s;
        rb.fields[2][2 * i] = rb.d3 * (rb.d1 - p.y());
        rb.fields[2][2 * i + 1] = rb.d3 * (rb.d2 + p.x());
    }
    return rb;
}

KernelBasis discrete_kernel(const SparseMatrix& B, const SparseMatrix& M1,
                            const SparseMatrix& Mv, const RigidBasis& rigid, double tau) {
    if (tau <= 0) throw std::invalid_argument("discrete_kernel: tau must be positive");

    Eigen::MatrixXd C(B.rows(), 3);
    for (int j = 0; j < 3; ++j) C.col(j) = B.mat * rigid.fields[j];

    Eigen::SimplicialLLT<SpMat> llt(M1.mat);
    if (llt.info() != Eigen::Success)
        throw SolveError("discrete_kernel: H1 mass matrix factorization failed");
    const Eigen::MatrixXd X = llt.solve(C);
    const Eigen::Matrix3d G = C.transpose() * X; // squared dual norms

    Eigen::Matrix3d S; // rigid Gram in the Mv metric
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) S(i, j) = rigid.fields[i].dot(Mv.mat * rigid.fields[j]);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> eig(G, S);
    if (eig.info() != Eigen::Success)
        throw SolveError("discrete_kernel: detection eigenproblem failed");

    KernelBasis kb;
    kb.tau = tau;
    for (int i = 0; i < 3; ++i) kb.detection_values[i] = eig.eigenvalues()[i];
    const double thr = tau * tau * std::max(1.0, eig.eigenvalues()[2]);
    for (int i = 0; i < 3; ++i) {
        if (eig.eigenvalues()[i] > thr) continue;
        Vector w = Vector::Zero(rigid.fields[0].size());
        for (int j = 0; j < 3; ++j) w += eig.eigenvectors()(j, i) * rigid.fields[j];
        // eigenvectors of the pencil (G, S) satisfy w^T S w = 1, so the
        // combined fields are already Mv-orthonormal
        kb.fields.push_back(std::move(w));
    }
    kb.dim = static_cast<int>(kb.fields.size());
    return kb;
}

Vector apply_projection(const KernelBasis& kernel, const SparseMatrix& Mv, const Vector& u) {
    Vector q = Vector::Zero(u.size());
    if (kernel.dim == 0) return q;
    const Vector mu = Mv.mat * u;
    for (const auto& w : kernel.fields) q += w.dot(mu) * w;
    return q;
}

RankDiagnostic rank_diagnostic(const FieldSpec& field, double t, const std::vector<Vec2>& samples,
                               double rel_tol) {
    if (samples.empty()) throw std::invalid_argument("rank_diagnostic: no sample points");
    Eigen::MatrixXd R(samples.size(), 3);
    for (size_t i = 0; i < samples.size(); ++i) {
        const Vec2& x = samples[i];
        const Vec2 zh = field.zhat(x, t);
        R(i, 0) = zh.x();
        R(i, 1) = zh.y();
        R(i, 2) = -x.y() * zh.x() + x.x() * zh.y();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    RankDiagnostic rd;
    const auto& sv = svd.singularValues();
    for (int i = 0; i < 3; ++i) rd.singular_values[i] = i < sv.size() ? sv[i] : 0.0;
    const double cutoff = rel_tol * rd.singular_values[0];
    rd.rank = 0;
    for (int i = 0; i < 3; ++i)
        if (rd.singular_values[i] > cutoff && rd.singular_values[i] > 0) ++rd.rank;
    rd.kernel_dim_bound = 3 - rd.rank;
    return rd;
}

} // namespace akvf
