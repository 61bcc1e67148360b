#include "bouss/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace bouss {

namespace {

Vec2 rotate_minus_90(const Vec2& v) { return Vec2(v.y(), -v.x()); }

}  // namespace

double Mesh::signed_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double Mesh::total_area() const {
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) s += signed_area(t);
    return s;
}

double Mesh::gamma1_measure() const {
    double s = 0.0;
    for (const auto& e : boundary_edges)
        if (e.tag == BoundaryTag::gamma1) s += e.length;
    return s;
}

bool Mesh::has_gamma1() const {
    return std::any_of(boundary_edges.begin(), boundary_edges.end(),
                       [](const BoundarySegment& e) { return e.tag == BoundaryTag::gamma1; });
}

std::vector<std::array<int, 2>> Mesh::unique_edges() const {
    std::set<std::array<int, 2>> edges;
    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.insert({a, b});
        }
    }
    return {edges.begin(), edges.end()};
}

Mesh build_rect_mesh(int nx, int ny, const BoundaryTagging& tagging, Rect domain) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: cell counts must be >= 1");
    if (domain.width <= 0.0 || domain.height <= 0.0)
        throw std::invalid_argument("build_rect_mesh: degenerate rectangle");
    if (tagging.gamma1_sides.size() >= 4)
        throw std::invalid_argument("build_rect_mesh: tagging leaves gamma0 empty");

    Mesh mesh;
    mesh.nx = nx;
    mesh.ny = ny;
    mesh.domain = domain;

    const double hx = domain.width / nx;
    const double hy = domain.height / ny;
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

    mesh.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.emplace_back(domain.x0 + i * hx, domain.y0 + j * hy);

    // each cell split along its SW-NE diagonal; both triangles CCW
    mesh.triangles.reserve(static_cast<size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }
    }

    auto cell_tri = [nx](int i, int j, int which) { return 2 * (j * nx + i) + which; };
    auto add_edge = [&](int v0, int v1, Side side, const Vec2& normal, int tri) {
        BoundarySegment seg;
        seg.v0 = v0;
        seg.v1 = v1;
        seg.tag = tagging.is_gamma1(side) ? BoundaryTag::gamma1 : BoundaryTag::gamma0;
        seg.normal = normal;
        seg.tangent = rotate_minus_90(normal);
        seg.length = (mesh.vertices[v1] - mesh.vertices[v0]).norm();
        seg.triangle = tri;
        mesh.boundary_edges.push_back(seg);
    };

    // CCW walk: bottom, right, top, left
    for (int i = 0; i < nx; ++i)
        add_edge(vid(i, 0), vid(i + 1, 0), Side::bottom, Vec2(0, -1), cell_tri(i, 0, 0));
    for (int j = 0; j < ny; ++j)
        add_edge(vid(nx, j), vid(nx, j + 1), Side::right, Vec2(1, 0), cell_tri(nx - 1, j, 0));
    for (int i = nx - 1; i >= 0; --i)
        add_edge(vid(i + 1, ny), vid(i, ny), Side::top, Vec2(0, 1), cell_tri(i, ny - 1, 1));
    for (int j = ny - 1; j >= 0; --j)
        add_edge(vid(0, j + 1), vid(0, j), Side::left, Vec2(-1, 0), cell_tri(0, j, 1));

    return mesh;
}

MeshReport validate_mesh(const Mesh& mesh) {
    MeshReport report;
    auto flag = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };

    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        if (mesh.signed_area(t) <= 0.0)
            flag("triangle " + std::to_string(t) + " has non-positive signed area");
    }

    // edges adjacent to exactly one triangle = the true boundary
    std::map<std::array<int, 2>, int> edge_count;
    std::map<std::array<int, 2>, int> edge_tri;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_count[{a, b}] += 1;
            edge_tri[{a, b}] = t;
        }
    }
    std::map<std::array<int, 2>, int> tagged_count;
    for (const auto& seg : mesh.boundary_edges) {
        int a = seg.v0, b = seg.v1;
        if (a > b) std::swap(a, b);
        tagged_count[{a, b}] += 1;
    }
    for (const auto& [edge, count] : edge_count) {
        if (count == 1 && tagged_count.find(edge) == tagged_count.end())
            flag("incomplete boundary partition: edge (" + std::to_string(edge[0]) + "," +
                 std::to_string(edge[1]) + ") is on the boundary but untagged");
        if (count > 1 && tagged_count.find(edge) != tagged_count.end())
            flag("interior edge (" + std::to_string(edge[0]) + "," + std::to_string(edge[1]) +
                 ") is tagged as boundary");
    }
    for (const auto& [edge, count] : tagged_count) {
        if (count > 1)
            flag("boundary edge (" + std::to_string(edge[0]) + "," + std::to_string(edge[1]) +
                 ") tagged more than once");
        if (edge_count.find(edge) == edge_count.end())
            flag("tagged edge (" + std::to_string(edge[0]) + "," + std::to_string(edge[1]) +
                 ") does not exist in the triangulation");
    }

    if (!mesh.boundary_edges.empty() &&
        std::all_of(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
                    [](const BoundarySegment& e) { return e.tag == BoundaryTag::gamma1; }))
        flag("gamma0 is empty (Poincare/Korn need a Dirichlet part)");

    for (int e = 0; e < static_cast<int>(mesh.boundary_edges.size()); ++e) {
        const auto& seg = mesh.boundary_edges[e];
        const std::string tag = "boundary edge " + std::to_string(e);
        if (std::abs(seg.normal.norm() - 1.0) > 1e-14) flag(tag + ": normal not unit");
        if (std::abs(seg.normal.dot(seg.tangent)) > 1e-14) flag(tag + ": tangent not orthogonal");
        if ((seg.tangent - Vec2(seg.normal.y(), -seg.normal.x())).norm() > 1e-14)
            flag(tag + ": tangent does not follow the tau = (nu_y, -nu_x) convention");
        const double len = (mesh.vertices[seg.v1] - mesh.vertices[seg.v0]).norm();
        if (std::abs(seg.length - len) > 1e-12 * (1.0 + len)) flag(tag + ": stored length wrong");
        if (seg.triangle < 0 || seg.triangle >= static_cast<int>(mesh.triangles.size())) {
            flag(tag + ": adjacent triangle index out of range");
            continue;
        }
        const auto& tri = mesh.triangles[seg.triangle];
        const Vec2 centroid =
            (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
        const Vec2 mid = 0.5 * (mesh.vertices[seg.v0] + mesh.vertices[seg.v1]);
        if (seg.normal.dot(mid - centroid) <= 0.0)
            flag(tag + ": normal does not point out of the adjacent triangle");
    }

    const long V = static_cast<long>(mesh.vertices.size());
    const long E = static_cast<long>(mesh.unique_edges().size());
    const long F = static_cast<long>(mesh.triangles.size());
    if (V - E + F != 1)
        flag("Euler characteristic V-E+F = " + std::to_string(V - E + F) + ", expected 1");

    const double area = mesh.total_area();
    if (std::abs(area - mesh.domain.area()) > 1e-12 * mesh.domain.area())
        flag("summed triangle area differs from rectangle area");

    return report;
}

void write_mesh_dump(const Mesh& mesh, std::ostream& os) {
    char buf[128];
    os << "# vertices " << mesh.vertices.size() << "\n";
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g\n", i, mesh.vertices[i].x(),
                      mesh.vertices[i].y());
        os << buf;
    }
    os << "# triangles " << mesh.triangles.size() << "\n";
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        os << t << " " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    }
    os << "# boundary_edges " << mesh.boundary_edges.size() << "\n";
    for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& seg = mesh.boundary_edges[e];
        os << e << " " << seg.v0 << " " << seg.v1 << " "
           << (seg.tag == BoundaryTag::gamma0 ? "gamma0" : "gamma1") << "\n";
    }
}

}  // namespace bouss
