#include "akvf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "akvf/errors.hpp"

namespace akvf {

namespace {

constexpr double kPi = 3.14159265358979323846;

long long edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b);
}

double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

} // namespace

DomainSpec DomainSpec::square(double a) {
    if (a <= 0) throw std::invalid_argument("square domain: half width must be positive");
    DomainSpec d;
    d.kind = DomainKind::square;
    d.half_width = a;
    return d;
}

DomainSpec DomainSpec::square_minus_disc(double a, double r) {
    if (a <= 0 || r <= 0 || r >= a)
        throw std::invalid_argument("square_minus_disc: need 0 < r < a");
    DomainSpec d;
    d.kind = DomainKind::square_minus_disc;
    d.half_width = a;
    d.inner_radius = r;
    return d;
}

DomainSpec DomainSpec::square_minus_square(double a, double b) {
    if (a <= 0 || b <= 0 || b >= a)
        throw std::invalid_argument("square_minus_square: need 0 < b < a");
    DomainSpec d;
    d.kind = DomainKind::square_minus_square;
    d.half_width = a;
    d.inner_half_width = b;
    return d;
}

DomainSpec DomainSpec::external(const std::string& path) {
    DomainSpec d;
    d.kind = DomainKind::external;
    d.path = path;
    return d;
}

double DomainSpec::area() const {
    const double a = half_width;
    switch (kind) {
        case DomainKind::square: return 4.0 * a * a;
        case DomainKind::square_minus_disc: return 4.0 * a * a - kPi * inner_radius * inner_radius;
        case DomainKind::square_minus_square:
            return 4.0 * a * a - 4.0 * inner_half_width * inner_half_width;
        case DomainKind::external: break;
    }
    throw std::logic_error("DomainSpec::area: unknown for external meshes");
}

double Mesh::tri_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 e1 = vertices[tri[1]] - vertices[tri[0]];
    const Vec2 e2 = vertices[tri[2]] - vertices[tri[0]];
    return 0.5 * cross2(e1, e2);
}

double Mesh::tri_diameter(int t) const {
    const auto& tri = triangles[t];
    const double d01 = (vertices[tri[1]] - vertices[tri[0]]).norm();
    const double d12 = (vertices[tri[2]] - vertices[tri[1]]).norm();
    const double d20 = (vertices[tri[0]] - vertices[tri[2]]).norm();
    return std::max({d01, d12, d20});
}

Mat2 Mesh::jacobian(int t) const {
    const auto& tri = triangles[t];
    Mat2 J;
    J.col(0) = vertices[tri[1]] - vertices[tri[0]];
    J.col(1) = vertices[tri[2]] - vertices[tri[0]];
    return J;
}

Vec2 Mesh::map_to_physical(int t, double xi, double eta) const {
    const auto& tri = triangles[t];
    return (1.0 - xi - eta) * vertices[tri[0]] + xi * vertices[tri[1]] + eta * vertices[tri[2]];
}

double Mesh::max_diameter() const {
    double d = 0;
    for (int t = 0; t < num_triangles(); ++t) d = std::max(d, tri_diameter(t));
    return d;
}

double Mesh::min_angle_deg() const {
    double worst = 180.0;
    for (const auto& tri : triangles) {
        for (int i = 0; i < 3; ++i) {
            const Vec2 u = vertices[tri[(i + 1) % 3]] - vertices[tri[i]];
            const Vec2 v = vertices[tri[(i + 2) % 3]] - vertices[tri[i]];
            const double ang = std::atan2(std::abs(cross2(u, v)), u.dot(v)) * 180.0 / kPi;
            worst = std::min(worst, ang);
        }
    }
    return worst;
}

double Mesh::total_area() const {
    double s = 0;
    for (int t = 0; t < num_triangles(); ++t) s += tri_area(t);
    return s;
}

void Mesh::check_conformity() const {
    const int nv = num_vertices();
    for (const auto& tri : triangles)
        for (int v : tri)
            if (v < 0 || v >= nv) throw std::runtime_error("mesh: triangle vertex index out of range");
    for (const auto& be : boundary_edges)
        if (be.a < 0 || be.a >= nv || be.b < 0 || be.b >= nv)
            throw std::runtime_error("mesh: boundary edge vertex index out of range");
    for (int t = 0; t < num_triangles(); ++t)
        if (tri_area(t) <= 0) throw std::runtime_error("mesh: non-positive triangle area (orientation)");

    std::map<long long, int> edge_count;
    for (const auto& tri : triangles)
        for (int i = 0; i < 3; ++i) edge_count[edge_key(tri[i], tri[(i + 1) % 3])]++;
    for (const auto& [key, count] : edge_count)
        if (count > 2) throw std::runtime_error("mesh: edge shared by more than two triangles");

    std::map<long long, int> boundary;
    for (const auto& be : boundary_edges) {
        if (!boundary.emplace(edge_key(be.a, be.b), be.marker).second)
            throw std::runtime_error("mesh: duplicate boundary edge");
    }
    for (const auto& [key, count] : edge_count) {
        const bool listed = boundary.count(key) > 0;
        if (count == 1 && !listed) throw std::runtime_error("mesh: missing boundary edge entry");
        if (count == 2 && listed) throw std::runtime_error("mesh: interior edge marked as boundary");
    }
    for (const auto& [key, marker] : boundary)
        if (edge_count.find(key) == edge_count.end())
            throw std::runtime_error("mesh: boundary edge not an element edge");
}

namespace {

// Partition [x0, x1] into ceil(len/h) uniform pieces.
std::vector<double> segment_points(double x0, double x1, double h) {
    const int n = std::max(1, static_cast<int>(std::ceil((x1 - x0) / h - 1e-12)));
    std::vector<double> pts(n + 1);
    for (int i = 0; i <= n; ++i) pts[i] = x0 + (x1 - x0) * (static_cast<double>(i) / n);
    return pts;
}

// Cartesian grid triangulation of the cells that survive `keep_cell`.
Mesh grid_mesh(const std::vector<double>& xs, const std::vector<double>& ys,
               const std::function<bool(double, double)>& keep_cell) {
    const int nx = static_cast<int>(xs.size()) - 1;
    const int ny = static_cast<int>(ys.size()) - 1;
    Mesh m;
    std::vector<int> vid((nx + 1) * (ny + 1), -1);
    auto vertex = [&](int i, int j) {
        int& id = vid[j * (nx + 1) + i];
        if (id < 0) {
            id = m.num_vertices();
            m.vertices.emplace_back(xs[i], ys[j]);
        }
        return id;
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!keep_cell(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))) continue;
            const int v00 = vertex(i, j), v10 = vertex(i + 1, j);
            const int v11 = vertex(i + 1, j + 1), v01 = vertex(i, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    }
    return m;
}

// Mark every element edge with exactly one adjacent triangle as boundary.
void derive_boundary_edges(Mesh& m, const std::function<int(const Vec2&, const Vec2&)>& marker_of) {
    std::map<long long, std::pair<std::pair<int, int>, int>> count;
    for (const auto& tri : m.triangles) {
        for (int i = 0; i < 3; ++i) {
            const int a = tri[i], b = tri[(i + 1) % 3];
            auto [it, inserted] = count.emplace(edge_key(a, b), std::make_pair(std::make_pair(a, b), 0));
            it->second.second++;
        }
    }
    m.boundary_edges.clear();
    for (const auto& [key, val] : count) {
        if (val.second != 1) continue;
        const auto [a, b] = val.first;
        m.boundary_edges.push_back({a, b, marker_of(m.vertices[a], m.vertices[b])});
    }
}

Mesh make_square(double a, double h) {
    const auto xs = segment_points(-a, a, h);
    Mesh m = grid_mesh(xs, xs, [](double, double) { return true; });
    derive_boundary_edges(m, [&](const Vec2&, const Vec2&) { return kOuterBoundary; });
    return m;
}

Mesh make_square_minus_square(double a, double b, double h) {
    // grid lines aligned with the hole edges at +-b
    std::vector<double> xs = segment_points(-a, -b, h);
    const auto mid = segment_points(-b, b, h);
    const auto right = segment_points(b, a, h);
    xs.insert(xs.end(), mid.begin() + 1, mid.end());
    xs.insert(xs.end(), right.begin() + 1, right.end());
    Mesh m = grid_mesh(xs, xs, [&](double cx, double cy) {
        return std::max(std::abs(cx), std::abs(cy)) > b;
    });
    derive_boundary_edges(m, [&](const Vec2& p, const Vec2& q) {
        const Vec2 mid = 0.5 * (p + q);
        const double d = std::max(std::abs(mid.x()), std::abs(mid.y()));
        return std::abs(d - b) < 1e-9 ? kInnerBoundary : kOuterBoundary;
    });
    return m;
}

// Graded ring mesh between the circular hole and the outer square: one
// vertex fan per direction theta_i, radially blended from the circle to the
// square perimeter. Band heights grow geometrically away from the hole, so
// the mesh is shape regular but not quasi-uniform.
Mesh make_square_minus_disc(double a, double r, double h) {
    int n_theta = static_cast<int>(std::ceil(8.0 * a / h - 1e-12));
    n_theta = ((n_theta + 7) / 8) * 8; // keep square corners on fan directions

    std::vector<double> heights;
    double step = 2.0 * kPi * r / n_theta;
    double sum = 0;
    while (sum < a - r) {
        heights.push_back(step);
        sum += step;
        step = std::min(1.8 * step, 0.75 * h);
    }
    const double scale = (a - r) / sum;
    for (double& v : heights) v *= scale;
    const int n_ring = static_cast<int>(heights.size());

    Mesh m;
    m.vertices.reserve((n_ring + 1) * n_theta);
    for (int j = 0; j <= n_ring; ++j) {
        double rho = r;
        for (int l = 0; l < j; ++l) rho += heights[l];
        const double s = (rho - r) / (a - r); // blend parameter in [0, 1]
        for (int i = 0; i < n_theta; ++i) {
            const double th = 2.0 * kPi * i / n_theta;
            const Vec2 dir(std::cos(th), std::sin(th));
            const Vec2 on_circle = r * dir;
            const Vec2 on_square = a / std::max(std::abs(dir.x()), std::abs(dir.y())) * dir;
            m.vertices.push_back((1.0 - s) * on_circle + s * on_square);
        }
    }
    auto vid = [&](int j, int i) { return j * n_theta + ((i % n_theta + n_theta) % n_theta); };
    for (int j = 0; j < n_ring; ++j) {
        for (int i = 0; i < n_theta; ++i) {
            const int A = vid(j, i), B = vid(j, i + 1);
            const int C = vid(j + 1, i + 1), D = vid(j + 1, i);
            m.triangles.push_back({A, D, C});
            m.triangles.push_back({A, C, B});
        }
    }
    derive_boundary_edges(m, [&](const Vec2& p, const Vec2& q) {
        return (std::abs(p.norm() - r) < 1e-9 && std::abs(q.norm() - r) < 1e-9)
                   ? kInnerBoundary
                   : kOuterBoundary;
    });
    m.inner_circle = Circle{Vec2(0, 0), r};
    return m;
}

} // namespace

Mesh generate_mesh(const DomainSpec& domain, double target_h) {
    if (domain.kind != DomainKind::external && target_h <= 0)
        throw std::invalid_argument("generate_mesh: target_h must be positive");
    Mesh m;
    switch (domain.kind) {
        case DomainKind::square:
            m = make_square(domain.half_width, target_h);
            break;
        case DomainKind::square_minus_disc:
            m = make_square_minus_disc(domain.half_width, domain.inner_radius, target_h);
            break;
        case DomainKind::square_minus_square:
            m = make_square_minus_square(domain.half_width, domain.inner_half_width, target_h);
            break;
        case DomainKind::external:
            m = read_mesh(domain.path);
            break;
    }
    m.domain = domain;
    m.level = 0;
    m.check_conformity();
    return m;
}

Mesh refine_uniform(const Mesh& mesh) {
    Mesh fine;
    fine.vertices = mesh.vertices;
    fine.domain = mesh.domain;
    fine.inner_circle = mesh.inner_circle;
    fine.level = mesh.level + 1;

    std::map<long long, int> midpoint;
    auto mid = [&](int a, int b) {
        const long long key = edge_key(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = fine.num_vertices();
        fine.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        midpoint.emplace(key, id);
        return id;
    };

    fine.triangles.reserve(4 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const int m01 = mid(tri[0], tri[1]);
        const int m12 = mid(tri[1], tri[2]);
        const int m20 = mid(tri[2], tri[0]);
        fine.triangles.push_back({tri[0], m01, m20});
        fine.triangles.push_back({tri[1], m12, m01});
        fine.triangles.push_back({tri[2], m20, m12});
        fine.triangles.push_back({m01, m12, m20});
    }

    fine.boundary_edges.reserve(2 * mesh.boundary_edges.size());
    for (const auto& be : mesh.boundary_edges) {
        const int m_ab = mid(be.a, be.b);
        if (mesh.inner_circle && be.marker == kInnerBoundary) {
            const auto& c = *mesh.inner_circle;
            Vec2& p = fine.vertices[m_ab];
            p = c.center + c.radius * (p - c.center).normalized();
        }
        fine.boundary_edges.push_back({be.a, m_ab, be.marker});
        fine.boundary_edges.push_back({m_ab, be.b, be.marker});
    }
    return fine;
}

Mesh refine_uniform(const Mesh& mesh, int times) {
    Mesh m = mesh;
    for (int i = 0; i < times; ++i) m = refine_uniform(m);
    return m;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
    lo_ = Vec2(1e300, 1e300);
    hi_ = Vec2(-1e300, -1e300);
    for (const auto& v : mesh.vertices) {
        lo_ = lo_.cwiseMin(v);
        hi_ = hi_.cwiseMax(v);
    }
    const int n = std::max(1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
    nx_ = ny_ = std::min(n, 2048);
    bin_w_ = (hi_.x() - lo_.x()) / nx_;
    bin_h_ = (hi_.y() - lo_.y()) / ny_;
    if (bin_w_ <= 0) bin_w_ = 1;
    if (bin_h_ <= 0) bin_h_ = 1;
    bins_.resize(static_cast<size_t>(nx_) * ny_);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        Vec2 tlo(1e300, 1e300), thi(-1e300, -1e300);
        for (int v : mesh.triangles[t]) {
            tlo = tlo.cwiseMin(mesh.vertices[v]);
            thi = thi.cwiseMax(mesh.vertices[v]);
        }
        int ix0, iy0, ix1, iy1;
        bin_range(tlo, ix0, iy0);
        bin_range(thi, ix1, iy1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix) bins_[bin_index(ix, iy)].push_back(t);
    }
}

void PointLocator::bin_range(const Vec2& p, int& ix, int& iy) const {
    ix = std::clamp(static_cast<int>((p.x() - lo_.x()) / bin_w_), 0, nx_ - 1);
    iy = std::clamp(static_cast<int>((p.y() - lo_.y()) / bin_h_), 0, ny_ - 1);
}

bool PointLocator::barycentric(const Mesh& m, int t, const Vec2& p, std::array<double, 3>& bary) {
    const auto& tri = m.triangles[t];
    const Vec2 v0 = m.vertices[tri[0]];
    const Vec2 e1 = m.vertices[tri[1]] - v0;
    const Vec2 e2 = m.vertices[tri[2]] - v0;
    const double det = cross2(e1, e2);
    if (det == 0) return false;
    const Vec2 d = p - v0;
    const double l1 = cross2(d, e2) / det;
    const double l2 = cross2(e1, d) / det;
    bary = {1.0 - l1 - l2, l1, l2};
    return true;
}

Location PointLocator::locate(const Vec2& p, double tol) const {
    int ix, iy;
    bin_range(p, ix, iy);
    Location best;
    double best_min = -1e300;
    for (int t : bins_[bin_index(ix, iy)]) {
        std::array<double, 3> bary;
        if (!barycentric(*mesh_, t, p, bary)) continue;
        const double lmin = std::min({bary[0], bary[1], bary[2]});
        if (lmin >= -tol && lmin > best_min) {
            best.tri = t;
            best.bary = bary;
            best_min = lmin;
        }
    }
    return best;
}

namespace {

// Euclidean distance from p to triangle t, and the closest point.
double point_triangle_distance(const Mesh& m, int t, const Vec2& p, Vec2& closest) {
    const auto& tri = m.triangles[t];
    const Vec2 a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
    const double det = cross2(b - a, c - a);
    const double l1 = cross2(p - a, c - a) / det;
    const double l2 = cross2(b - a, p - a) / det;
    if (l1 >= 0 && l2 >= 0 && 1 - l1 - l2 >= 0) {
        closest = p;
        return 0.0;
    }
    double best = 1e300;
    const Vec2 pts[3] = {a, b, c};
    for (int i = 0; i < 3; ++i) {
        const Vec2 u = pts[i], v = pts[(i + 1) % 3];
        const Vec2 uv = v - u;
        const double s = std::clamp((p - u).dot(uv) / uv.squaredNorm(), 0.0, 1.0);
        const Vec2 q = u + s * uv;
        const double d = (p - q).norm();
        if (d < best) {
            best = d;
            closest = q;
        }
    }
    return best;
}

} // namespace

PointLocator::Clamped PointLocator::locate_clamped(const Vec2& p, double max_distance) const {
    const Location inside = locate(p);
    if (inside.found()) return {inside.tri, inside.bary, 0.0};

    int ix, iy;
    bin_range(p, ix, iy);
    Clamped best;
    best.distance = 1e300;
    const int max_ring = std::max(nx_, ny_);
    int found_ring = -1;
    for (int ring = 0; ring <= max_ring; ++ring) {
        if (found_ring >= 0 && ring > found_ring + 1) break; // one safety ring
        bool any_bin = false;
        for (int iy2 = iy - ring; iy2 <= iy + ring; ++iy2) {
            for (int ix2 = ix - ring; ix2 <= ix + ring; ++ix2) {
                if (ix2 < 0 || ix2 >= nx_ || iy2 < 0 || iy2 >= ny_) continue;
                if (std::max(std::abs(ix2 - ix), std::abs(iy2 - iy)) != ring) continue;
                any_bin = true;
                for (int t : bins_[bin_index(ix2, iy2)]) {
                    Vec2 closest;
                    const double d = point_triangle_distance(*mesh_, t, p, closest);
                    if (d < best.distance) {
                        std::array<double, 3> bary;
                        barycentric(*mesh_, t, closest, bary);
                        for (double& l : bary) l = std::max(l, 0.0);
                        const double s = bary[0] + bary[1] + bary[2];
                        for (double& l : bary) l /= s;
                        best = {t, bary, d};
                    }
                }
            }
        }
        if (best.distance < 1e300 && found_ring < 0) found_ring = ring;
        if (!any_bin && ring > 0 && found_ring >= 0) break;
    }
    if (best.tri < 0 || best.distance > max_distance)
        throw EvaluationError("point outside mesh beyond tolerance", p);
    return best;
}

Location locate_point(const Mesh& mesh, const Vec2& p, double tol) {
    return PointLocator(mesh).locate(p, tol);
}

void write_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mesh: cannot open " + path);
    char buf[80];
    out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' '
        << mesh.boundary_edges.size() << '\n';
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x(), v.y());
        out << buf;
    }
    for (const auto& tri : mesh.triangles)
        out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << " 0\n";
    for (const auto& be : mesh.boundary_edges)
        out << be.a << ' ' << be.b << ' ' << be.marker << '\n';
    if (!out) throw std::runtime_error("write_mesh: write failed for " + path);
}

Mesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_mesh: cannot open " + path);
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> std::istringstream {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
                return std::istringstream(line);
        }
        throw ParseError("unexpected end of mesh file", line_no);
    };

    Mesh m;
    long nv, nt, nbe;
    {
        auto ls = next_line();
        if (!(ls >> nv >> nt >> nbe) || nv < 3 || nt < 1 || nbe < 0)
            throw ParseError("bad mesh header counts", line_no);
    }
    m.vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        auto ls = next_line();
        double x, y;
        if (!(ls >> x >> y)) throw ParseError("bad vertex line", line_no);
        m.vertices.emplace_back(x, y);
    }
    int repaired = 0;
    for (long i = 0; i < nt; ++i) {
        auto ls = next_line();
        int a, b, c, marker;
        if (!(ls >> a >> b >> c >> marker)) throw ParseError("bad triangle line", line_no);
        if (a < 0 || a >= nv || b < 0 || b >= nv || c < 0 || c >= nv)
            throw ParseError("triangle vertex index out of range", line_no);
        m.triangles.push_back({a, b, c});
        if (m.tri_area(static_cast<int>(m.triangles.size()) - 1) < 0) {
            std::swap(m.triangles.back()[1], m.triangles.back()[2]);
            ++repaired;
        }
    }
    if (repaired > 0)
        std::cerr << "read_mesh: repaired orientation of " << repaired << " triangle(s) in "
                  << path << "\n";
    for (long i = 0; i < nbe; ++i) {
        auto ls = next_line();
        int a, b, marker;
        if (!(ls >> a >> b >> marker)) throw ParseError("bad boundary edge line", line_no);
        if (a < 0 || a >= nv || b < 0 || b >= nv)
            throw ParseError("boundary edge vertex index out of range", line_no);
        m.boundary_edges.push_back({a, b, marker});
    }
    m.domain = DomainSpec::external(path);
    m.check_conformity();
    return m;
}

} // namespace akvf
