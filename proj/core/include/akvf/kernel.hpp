#pragma once

#include <array>
#include <vector>

#include "akvf/assembly.hpp"
#include "akvf/fespace.hpp"
#include "akvf/types.hpp"

namespace akvf {

// L2-orthonormal basis of the rigid motions on the meshed domain:
//   v1 = |O|^{-1/2} (1,0),  v2 = |O|^{-1/2} (0,1),
//   v3 = d3 (d1 - y, d2 + x)
// with d1 = |O|^{-1} int y, d2 = -|O|^{-1} int x and d3 normalizing v3.
struct RigidBasis {
    std::array<Vector, 3> fields; // interpolants on the vector space
    double d1 = 0, d2 = 0, d3 = 0;
    double area = 0;
};

// Requires a rule of order >= 2 (the normalization integrals are quadratic).
RigidBasis rigid_motion_basis(const FESpace& vspace, const QuadratureRule& rule);

// Detected discrete kernel: rigid motions annihilated by the constraint
// within tolerance. detection_values are the generalized eigenvalues of
// the squared dual-norm Gram (B w)^T M1^{-1} (B w) restricted to the rigid
// space in the Mv metric; values <= tau^2 max(1, max value) count as kernel.
struct KernelBasis {
    int dim = 0;
    std::vector<Vector> fields; // Mv-orthonormal
    std::array<double, 3> detection_values{};
    double tau = 0;
};

KernelBasis discrete_kernel(const SparseMatrix& B, const SparseMatrix& M1,
                            const SparseMatrix& Mv, const RigidBasis& rigid, double tau = 1e-8);

// Q u: Mv-orthogonal projection onto the detected kernel.
Vector apply_projection(const KernelBasis& kernel, const SparseMatrix& Mv, const Vector& u);

// Pointwise necessary condition on the kernel dimension: stack rows
// (zhat_1, zhat_2, -y zhat_1 + x zhat_2) at sample points; the kernel
// dimension is at most 3 - rank.
struct RankDiagnostic {
    std::array<double, 3> singular_values{};
    int rank = 0;
    int kernel_dim_bound = 3;
};

RankDiagnostic rank_diagnostic(const FieldSpec& field, double t, const std::vector<Vec2>& samples,
                               double rel_tol = 1e-8);

} // namespace akvf
