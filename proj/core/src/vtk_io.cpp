#include "akvf/vtk_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "akvf/errors.hpp"

namespace akvf {

namespace {

void write_header(std::ofstream& out, const Mesh& mesh, const std::string& title) {
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    char buf[80];
    for (const Vec2& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", v.x(), v.y());
        out << buf;
    }
    out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << "\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
    out << "CELL_TYPES " << mesh.num_triangles() << "\n";
    for (int i = 0; i < mesh.num_triangles(); ++i) out << "5\n";
}

} // namespace

void write_vtk_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    write_header(out, mesh, "mesh");
}

void write_vtk_solution(const Mesh& mesh, const FESpace& vspace, const Vector& u,
                        const FESpace& sspace, const Vector& lambda, const std::string& path) {
    if (vspace.components != 2 || sspace.components != 1)
        throw std::invalid_argument("write_vtk_solution: expected vector + scalar spaces");
    if (u.size() != vspace.ndof() || lambda.size() != sspace.ndof())
        throw std::invalid_argument("write_vtk_solution: coefficient sizes do not match");

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    write_header(out, mesh, "solution");

    char buf[80];
    out << "POINT_DATA " << mesh.num_vertices() << "\n";
    out << "VECTORS velocity double\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", u[2 * v], u[2 * v + 1]);
        out << buf;
    }
    out << "SCALARS lambda double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", lambda[v]);
        out << buf;
    }
}

} // namespace akvf
