#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "akvf/types.hpp"

namespace akvf {

// Boundary markers used by the built-in generators.
inline constexpr int kOuterBoundary = 1;
inline constexpr int kInnerBoundary = 2;

enum class DomainKind { square, square_minus_disc, square_minus_square, external };

struct DomainSpec {
    DomainKind kind = DomainKind::square;
    double half_width = 0.0;       // outer square is (-a, a)^2
    double inner_radius = 0.0;     // disc hole radius
    double inner_half_width = 0.0; // square hole is (-b, b)^2
    std::string path;              // external mesh file

    static DomainSpec square(double a);
    static DomainSpec square_minus_disc(double a, double r);
    static DomainSpec square_minus_square(double a, double b);
    static DomainSpec external(const std::string& path);

    // Continuum area of the domain (the disc hole is counted as a true disc).
    double area() const;
};

struct Circle {
    Vec2 center;
    double radius;
};

struct BoundaryEdge {
    int a, b;
    int marker;
};

// Conforming triangulation with counterclockwise elements.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::optional<Circle> inner_circle; // refinement snaps inner-boundary midpoints here
    DomainSpec domain;
    int level = 0;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    double tri_area(int t) const;
    double tri_diameter(int t) const;
    // Affine map columns: [v1 - v0, v2 - v0].
    Mat2 jacobian(int t) const;
    Vec2 map_to_physical(int t, double xi, double eta) const;

    double max_diameter() const;
    double min_angle_deg() const;
    double total_area() const;

    // Throws std::runtime_error on broken connectivity, orientation or markers.
    void check_conformity() const;
};

// Structured generator; max element diameter <= 1.5 * target_h.
Mesh generate_mesh(const DomainSpec& domain, double target_h);

// Red refinement (edge-midpoint quadrisection); inner-circle boundary
// midpoints are projected onto the circle.
Mesh refine_uniform(const Mesh& mesh);
Mesh refine_uniform(const Mesh& mesh, int times);

struct Location {
    int tri = -1;
    std::array<double, 3> bary{}; // barycentric w.r.t. triangle vertices 0,1,2
    bool found() const { return tri >= 0; }
};

// Uniform-bin spatial index for repeated point queries.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh);

    // Containing triangle, or not-found. tol is the barycentric slack.
    Location locate(const Vec2& p, double tol = 1e-10) const;

    struct Clamped {
        int tri = -1;
        std::array<double, 3> bary{};
        double distance = 0.0; // Euclidean distance from p to the element
    };
    // Nearest element with clamped barycentric coordinates; throws
    // EvaluationError if p is farther than max_distance from the mesh.
    Clamped locate_clamped(const Vec2& p, double max_distance) const;

private:
    const Mesh* mesh_;
    Vec2 lo_, hi_;
    int nx_ = 0, ny_ = 0;
    double bin_w_ = 0, bin_h_ = 0;
    std::vector<std::vector<int>> bins_;

    int bin_index(int ix, int iy) const { return iy * nx_ + ix; }
    void bin_range(const Vec2& p, int& ix, int& iy) const;
    static bool barycentric(const Mesh& m, int t, const Vec2& p, std::array<double, 3>& bary);
};

Location locate_point(const Mesh& mesh, const Vec2& p, double tol = 1e-10);

// Plain-text mesh format:
//   nv nt nbe
//   x y            (vertex lines)
//   i j k marker   (triangle lines)
//   i j marker     (boundary edge lines)
// Values use 17 significant digits; read(write(m)) is identity.
void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(const std::string& path);

} // namespace akvf
