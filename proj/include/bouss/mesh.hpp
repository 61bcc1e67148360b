#pragma once

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace bouss {

using Vec2 = Eigen::Vector2d;

enum class BoundaryTag { gamma0, gamma1 };

enum class Side { left, right, bottom, top };

struct BoundarySegment {
    int v0 = -1;     // endpoints, ordered CCW along the boundary
    int v1 = -1;
    BoundaryTag tag = BoundaryTag::gamma0;
    Vec2 normal;     // unit outward normal
    Vec2 tangent;    // normal rotated by -pi/2: tau = (nu_y, -nu_x)
    double length = 0.0;
    int triangle = -1;  // the single adjacent triangle
};

struct Rect {
    double x0 = 0.0, y0 = 0.0;
    double width = 1.0, height = 1.0;
    double area() const { return width * height; }
    double perimeter() const { return 2.0 * (width + height); }
};

// Which sides of the rectangle carry the gamma1 (friction / heat flux)
// condition; all remaining sides are gamma0 (Dirichlet). gamma0 must be
// nonempty.
struct BoundaryTagging {
    std::set<Side> gamma1_sides;
    bool is_gamma1(Side s) const { return gamma1_sides.count(s) > 0; }
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // CCW vertex indices
    std::vector<BoundarySegment> boundary_edges;
    Rect domain;
    int nx = 0, ny = 0;  // structured resolution used to build the mesh

    double signed_area(int t) const;
    double total_area() const;
    double gamma1_measure() const;
    bool has_gamma1() const;
    // unique undirected edges of the triangulation
    std::vector<std::array<int, 2>> unique_edges() const;
};

// Structured triangulation of an axis-aligned rectangle: (nx+1)(ny+1)
// vertices, 2*nx*ny triangles, each cell split along the SW-NE diagonal
// (refinements are nested). Throws std::invalid_argument on a zero cell
// count or a tagging that leaves gamma0 empty.
Mesh build_rect_mesh(int nx, int ny, const BoundaryTagging& tagging, Rect domain = {});

struct MeshReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

MeshReport validate_mesh(const Mesh& mesh);

// Plain-text node/element/edge-tag dump, one record per line.
void write_mesh_dump(const Mesh& mesh, std::ostream& os);

}  // namespace bouss
