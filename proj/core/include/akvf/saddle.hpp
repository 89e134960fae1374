#pragma once

#include <vector>

#include "akvf/assembly.hpp"
#include "akvf/kernel.hpp"
#include "akvf/types.hpp"

namespace akvf {

// Kernel-bordered saddle-point system
//   [[A, B^T, N], [B, 0, 0], [N^T, 0, 0]] (u, lambda, alpha) = (0, g, c)
// with border columns N_j = Mv w_j for the detected kernel basis. When the
// kernel is empty the border is absent.
struct SaddleSystem {
    SpMat K;           // assembled block matrix (symmetric)
    Eigen::MatrixXd N; // n_v x m border columns
    Vector g;
    Vector c;
    int nv = 0, nl = 0, m = 0;

    int size() const { return nv + nl + m; }
    Vector rhs() const;
    double scale() const { return g.norm() + c.norm() + 1.0; }
};

SaddleSystem build_system(const SparseMatrix& A, const SparseMatrix& B, const SparseMatrix& Mv,
                          const KernelBasis& kernel, const Vector& g,
                          const std::vector<double>& c);

struct Solution {
    Vector u;      // velocity coefficients
    Vector lambda; // multiplier coefficients
    Vector alpha;  // bordering multipliers (size m)
    double res_momentum = 0;   // |A u + B^T lambda + N alpha|
    double res_constraint = 0; // |B u - g|
    double res_border = 0;     // |N^T u - c|
};

// Direct sparse factorization. Throws SolveError when the factorization
// fails (usual cause: kernel misdetection; retry with a different tau) or
// when a block residual exceeds 1e-9 * scale.
Solution solve_system(const SaddleSystem& sys);

// Test oracle: pseudo-solve of the unbordered (singular for m >= 1) system
// with a single added gauge vector, followed by the projection correction
// u = (I - Q) u~ + sum_j c_j w_j. Requires the gauge to remove the whole
// nullspace, which holds for m <= 1.
Solution solve_projected(const SaddleSystem& sys, const KernelBasis& kernel,
                         const SparseMatrix& Mv);

struct EnergyDiagnostics {
    double energy = 0;    // a(u_h, u_h)
    double lambda_h1 = 0; // |lambda_h|_1
    double ratio = 0;     // lambda_h1 / sqrt(energy)
    bool ratio_valid = false;
};

EnergyDiagnostics energy_diagnostics(const Solution& sol, const SparseMatrix& A,
                                     const SparseMatrix& M1);

} // namespace akvf
