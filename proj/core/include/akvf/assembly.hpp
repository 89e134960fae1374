#pragma once

#include <string>
#include <vector>

#include "akvf/fespace.hpp"
#include "akvf/fields.hpp"
#include "akvf/quadrature.hpp"
#include "akvf/types.hpp"

namespace akvf {

// Compressed sparse matrix with a symmetry tag. Stored values with
// magnitude below 1e-300 are pruned after assembly.
struct SparseMatrix {
    SpMat mat;
    bool symmetric = false;

    int rows() const { return static_cast<int>(mat.rows()); }
    int cols() const { return static_cast<int>(mat.cols()); }
    void prune_tiny();
    // max |a_ij - a_ji| over stored entries (0 for exactly symmetric).
    double symmetry_defect() const;
};

// Strain form a(v, w) = int E(v):E(w), E(v) = grad v + (grad v)^T,
// on a vector space. Symmetric positive semidefinite; rigid motions are
// in the kernel.
SparseMatrix assemble_strain(const FESpace& vspace, const QuadratureRule& rule);

// H1 product (v, w)_1 = int grad v : grad w + v . w (scalar or vector
// space, by space.components). Symmetric positive definite.
SparseMatrix assemble_h1(const FESpace& space, const QuadratureRule& rule);

// Constraint form b(mu, v) = (mu, v . zhat)_1; rows: scalar space, cols:
// vector space. Entry (i, (j,c)) integrates
//   grad mu_i . (zhat_c grad N_j + N_j grad(zhat_c)) + mu_i N_j zhat_c.
SparseMatrix assemble_b(const FESpace& sspace, const FESpace& vspace, const FieldSpec& field,
                        double t, const QuadratureRule& rule);

struct RhsData {
    Vector g;                // g_i = (mu_i, z)_1
    std::vector<double> z_h1; // (zvec, w_j)_1 per kernel basis field w_j
};
RhsData assemble_rhs(const FESpace& sspace, const FESpace& vspace, const FieldSpec& field,
                     double t, const QuadratureRule& rule,
                     const std::vector<Vector>& kernel_fields);

// Element matrices (dense), used as assembly oracles.
Eigen::MatrixXd element_strain(const Mesh& mesh, int tri, int k, const QuadratureRule& rule);
Eigen::MatrixXd element_h1(const Mesh& mesh, int tri, int k, int components,
                           const QuadratureRule& rule);

// Coordinate text export: "rows cols nnz" header then "i j value" lines.
void write_matrix(const SparseMatrix& m, const std::string& path);

} // namespace akvf
