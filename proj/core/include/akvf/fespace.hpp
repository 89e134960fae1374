#pragma once

#include <functional>
#include <vector>

#include "akvf/mesh.hpp"
#include "akvf/types.hpp"

namespace akvf {

// Values and reference gradients of all local basis functions at one point.
struct BasisEval {
    int n = 0;
    double val[10];
    Vec2 grad[10]; // gradients w.r.t. reference coordinates (xi, eta)
};

// Lagrange basis on the reference triangle, k in {1,2,3}. Local ordering:
// 3 vertex functions, then (k-1) per edge for edges (0,1), (1,2), (2,0),
// then the interior bubble (k=3).
void eval_ref_basis(int k, double xi, double eta, BasisEval& out);

int local_basis_size(int k);

// Continuous Lagrange space on a triangulation; components = 1 (scalar)
// or 2 (vector fields with interleaved coefficients: dof 2*s + c for
// scalar dof s and component c).
struct FESpace {
    const Mesh* mesh = nullptr;
    int k = 1;
    int components = 1;
    int ndof_scalar = 0;
    int nloc = 0;
    std::vector<int> elem_dofs;   // num_triangles x nloc (scalar dof ids)
    std::vector<Vec2> dof_points; // nodal point per scalar dof

    int ndof() const { return components * ndof_scalar; }
    const int* dofs(int t) const { return elem_dofs.data() + static_cast<size_t>(t) * nloc; }
};

FESpace build_space(const Mesh& mesh, int k, int components = 1);

// Nodal interpolant.
Vector interpolate(const FESpace& space, const std::function<double(const Vec2&)>& f);
Vector interpolate(const FESpace& space, const std::function<Vec2(const Vec2&)>& f);

// Evaluation at a located point (scalar spaces).
double eval_scalar(const FESpace& space, const Vector& coeffs, const Location& loc);
Vec2 eval_scalar_grad(const FESpace& space, const Vector& coeffs, const Location& loc);

// Evaluation at a located point (vector spaces). Jacobian rows follow
// (grad v)_{rs} = d v_r / d x_s.
Vec2 eval_vector(const FESpace& space, const Vector& coeffs, const Location& loc);
Mat2 eval_vector_grad(const FESpace& space, const Vector& coeffs, const Location& loc);

} // namespace akvf
