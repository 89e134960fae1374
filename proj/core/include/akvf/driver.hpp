#pragma once

#include <memory>

#include "akvf/assembly.hpp"
#include "akvf/fespace.hpp"
#include "akvf/kernel.hpp"
#include "akvf/mesh.hpp"
#include "akvf/problems.hpp"
#include "akvf/quadrature.hpp"
#include "akvf/saddle.hpp"

namespace akvf {

struct SolveOptions {
    int k = 1;
    int boost = 0; // assembly quadrature order is 2k + boost
    int level = 0; // uniform refinements of the generated base mesh
    double h0 = 1.0;
    double tau = 1e-8;
    DegeneracyPolicy policy = DegeneracyPolicy::fail;
    double time = 0;

    int quad_order(int for_k) const;
};

struct Timings {
    double mesh = 0, assemble = 0, kernel = 0, solve = 0, total = 0;
};

struct SolveResult {
    std::shared_ptr<Mesh> mesh; // spaces point into this
    FESpace vspace, sspace;
    QuadratureRule rule;
    FieldSpec field;
    SparseMatrix A, B, M1, Mv;
    RigidBasis rigid;
    KernelBasis kernel;
    RhsData data;
    SaddleSystem system;
    Solution sol;
    EnergyDiagnostics diag;
    DegeneracyStats degeneracy;
    double time = 0;
    double h = 0;
    Timings timings;
};

SolveResult solve_problem(const ProblemSpec& problem, const SolveOptions& opts);

// Repeated solves of one problem at varying times (tracking): the mesh,
// spaces, strain and H1 matrices, their factorizable parts and the rigid
// basis are built once; only the constraint side is redone per time.
class ProblemSolver {
public:
    ProblemSolver(const ProblemSpec& problem, const SolveOptions& opts);

    struct Step {
        KernelBasis kernel;
        Solution sol;
        EnergyDiagnostics diag;
        double time = 0;
    };
    Step solve_at(double t);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<Mesh>& mesh_ptr() const { return mesh_; }
    const FESpace& vspace() const { return vspace_; }
    const FESpace& sspace() const { return sspace_; }
    const FieldSpec& field() const { return field_; }
    const DegeneracyStats& degeneracy() const { return stats_; }
    const SolveOptions& options() const { return opts_; }

private:
    ProblemSpec problem_;
    SolveOptions opts_;
    std::shared_ptr<Mesh> mesh_;
    FESpace vspace_, sspace_;
    QuadratureRule rule_;
    DegeneracyStats stats_;
    FieldSpec field_;
    SparseMatrix A_, M1_, Mv_;
    RigidBasis rigid_;
};

} // namespace akvf
