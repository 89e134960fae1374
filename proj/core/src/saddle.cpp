#include "akvf/saddle.hpp"

#include <Eigen/SparseLU>
#ifdef AKVF_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "akvf/errors.hpp"

namespace akvf {

Vector SaddleSystem::rhs() const {
    Vector r = Vector::Zero(size());
    r.segment(nv, nl) = g;
    r.segment(nv + nl, m) = c;
    return r;
}

SaddleSystem build_system(const SparseMatrix& A, const SparseMatrix& B, const SparseMatrix& Mv,
                          const KernelBasis& kernel, const Vector& g,
                          const std::vector<double>& c) {
    const int nv = A.rows();
    const int nl = B.rows();
    const int m = kernel.dim;
    if (A.cols() != nv || B.cols() != nv || Mv.rows() != nv || Mv.cols() != nv)
        throw std::invalid_argument("build_system: block dimension mismatch");
    if (g.size() != nl || static_cast<int>(c.size()) != m)
        throw std::invalid_argument("build_system: rhs dimension mismatch");

    SaddleSystem sys;
    sys.nv = nv;
    sys.nl = nl;
    sys.m = m;
    sys.g = g;
    sys.c = Eigen::Map<const Vector>(c.data(), m);
    sys.N.resize(nv, m);
    for (int j = 0; j < m; ++j) sys.N.col(j) = Mv.mat * kernel.fields[j];

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.mat.nonZeros() + 2 * B.mat.nonZeros() + 2 * static_cast<size_t>(m) * nv);
    for (int o = 0; o < A.mat.outerSize(); ++o)
        for (SpMat::InnerIterator it(A.mat, o); it; ++it)
            trips.emplace_back(it.row(), it.col(), it.value());
    for (int o = 0; o < B.mat.outerSize(); ++o)
        for (SpMat::InnerIterator it(B.mat, o); it; ++it) {
            trips.emplace_back(nv + it.row(), it.col(), it.value());
            trips.emplace_back(it.col(), nv + it.row(), it.value());
        }
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < nv; ++i) {
            const double v = sys.N(i, j);
            if (v == 0) continue;
            trips.emplace_back(i, nv + nl + j, v);
            trips.emplace_back(nv + nl + j, i, v);
        }
    sys.K.resize(sys.size(), sys.size());
    sys.K.setFromTriplets(trips.begin(), trips.end());
    sys.K.makeCompressed();
    return sys;
}

namespace {

Solution unpack(const SaddleSystem& sys, const Vector& x) {
    Solution sol;
    sol.u = x.segment(0, sys.nv);
    sol.lambda = x.segment(sys.nv, sys.nl);
    sol.alpha = x.segment(sys.nv + sys.nl, sys.m);
    const Vector r = sys.K * x - sys.rhs();
    sol.res_momentum = r.segment(0, sys.nv).norm();
    sol.res_constraint = r.segment(sys.nv, sys.nl).norm();
    sol.res_border = r.segment(sys.nv + sys.nl, sys.m).norm();
    return sol;
}

// A couple of refinement passes recover the last digits the LU loses on
// fine meshes. Returns false when the iterate stalls above target or NaNs.
template <class Factorization>
bool refine_to(Factorization& lu, const SpMat& K, const Vector& rhs, double target, Vector& x) {
    x = lu.solve(rhs);
    for (int pass = 0; pass < 3; ++pass) {
        if (x.hasNaN()) return false;
        const Vector r = rhs - K * x;
        if (r.norm() <= target) return true;
        x += lu.solve(r).eval();
    }
    return !x.hasNaN() && (rhs - K * x).norm() <= target;
}

// Bordered systems carry dense kernel rows that blow up UMFPACK's fronts,
// so those (and builds without SuiteSparse) go through SparseLU.
Vector direct_solve(const SpMat& K, const Vector& rhs, double target, bool bordered) {
    Vector x;
#ifdef AKVF_HAVE_UMFPACK
    if (!bordered) {
        Eigen::UmfPackLU<SpMat> lu;
        lu.compute(K);
        if (lu.info() == Eigen::Success && refine_to(lu, K, rhs, target, x)) return x;
    }
#else
    (void)bordered;
#endif
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(K);
    lu.factorize(K);
    if (lu.info() != Eigen::Success)
        throw SolveError("saddle factorization failed (" + lu.lastErrorMessage() +
                         "); likely kernel misdetection, retry with a different tau");
    refine_to(lu, K, rhs, target, x);
    return x;
}

} // namespace

Solution solve_system(const SaddleSystem& sys) {
    const double tol = 1e-9 * sys.scale();
    const Vector x = direct_solve(sys.K, sys.rhs(), 0.1 * tol, sys.m > 0);
    Solution sol = unpack(sys, x);
    if (sol.res_momentum > tol || sol.res_constraint > tol || sol.res_border > tol) {
        std::ostringstream os;
        os << "saddle solve residuals exceed tolerance " << tol << ": momentum "
           << sol.res_momentum << ", constraint " << sol.res_constraint << ", border "
           << sol.res_border;
        throw SolveError(os.str());
    }
    return sol;
}

Solution solve_projected(const SaddleSystem& sys, const KernelBasis& kernel,
                         const SparseMatrix& Mv) {
    const int nv = sys.nv, nl = sys.nl;
    const int ng = sys.m > 0 ? 1 : 0;
    Vector gauge = Vector::Zero(nv);
    for (int j = 0; j < sys.m; ++j) gauge += sys.N.col(j);

    std::vector<Eigen::Triplet<double>> trips;
    for (int o = 0; o < sys.K.outerSize(); ++o)
        for (SpMat::InnerIterator it(sys.K, o); it; ++it)
            if (it.row() < nv + nl && it.col() < nv + nl)
                trips.emplace_back(it.row(), it.col(), it.value());
    if (ng) {
        for (int i = 0; i < nv; ++i) {
            if (gauge[i] == 0) continue;
            trips.emplace_back(i, nv + nl, gauge[i]);
            trips.emplace_back(nv + nl, i, gauge[i]);
        }
    }
    SpMat K(nv + nl + ng, nv + nl + ng);
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();

    Vector rhs = Vector::Zero(nv + nl + ng);
    rhs.segment(nv, nl) = sys.g;

    const Vector x = direct_solve(K, rhs, 1e-10 * sys.scale(), ng > 0);

    Solution sol;
    sol.u = x.segment(0, nv);
    sol.lambda = x.segment(nv, nl);
    sol.alpha = Vector::Zero(sys.m);
    sol.u -= apply_projection(kernel, Mv, sol.u);
    for (int j = 0; j < sys.m; ++j) sol.u += sys.c[j] * kernel.fields[j];
    return sol;
}

EnergyDiagnostics energy_diagnostics(const Solution& sol, const SparseMatrix& A,
                                     const SparseMatrix& M1) {
    EnergyDiagnostics d;
    d.energy = sol.u.dot(A.mat * sol.u);
    d.lambda_h1 = std::sqrt(std::max(0.0, sol.lambda.dot(M1.mat * sol.lambda)));
    if (d.energy > 1e-20) {
        d.ratio = d.lambda_h1 / std::sqrt(d.energy);
        d.ratio_valid = true;
    }
    return d;
}

} // namespace akvf
