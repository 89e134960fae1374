#pragma once

#include <string>

#include "akvf/fespace.hpp"
#include "akvf/mesh.hpp"
#include "akvf/types.hpp"

namespace akvf {

// Legacy ASCII VTK (unstructured grid, cell type 5).
void write_vtk_mesh(const Mesh& mesh, const std::string& path);

// Mesh plus vertex-sampled velocity (VECTORS) and multiplier (SCALARS).
// Higher-order dofs are not exported; vertex dofs coincide with vertex ids.
void write_vtk_solution(const Mesh& mesh, const FESpace& vspace, const Vector& u,
                        const FESpace& sspace, const Vector& lambda, const std::string& path);

} // namespace akvf
