#include "bouss/mesh.hpp"

#include <doctest.h>

#include <sstream>

using namespace bouss;

TEST_CASE("2x2 all-gamma0 mesh has the structured counts") {
    const Mesh mesh = build_rect_mesh(2, 2, {});
    CHECK(mesh.vertices.size() == 9);
    CHECK(mesh.triangles.size() == 8);
    CHECK(mesh.boundary_edges.size() == 8);
    for (const auto& e : mesh.boundary_edges) CHECK(e.tag == BoundaryTag::gamma0);
    CHECK(validate_mesh(mesh).ok());
}

TEST_CASE("1x1 mesh with gamma1 bottom carries the outward normal (0,-1)") {
    const Mesh mesh = build_rect_mesh(1, 1, {{Side::bottom}});
    CHECK(mesh.vertices.size() == 4);
    CHECK(mesh.triangles.size() == 2);
    int bottom_edges = 0;
    for (const auto& e : mesh.boundary_edges) {
        if (e.tag == BoundaryTag::gamma1) {
            ++bottom_edges;
            CHECK(e.normal.x() == doctest::Approx(0.0));
            CHECK(e.normal.y() == doctest::Approx(-1.0));
            CHECK(e.tangent.x() == doctest::Approx(-1.0));
            CHECK(e.tangent.y() == doctest::Approx(0.0));
        }
    }
    CHECK(bottom_edges == 1);
}

TEST_CASE("boundary edge lengths sum to the rectangle perimeter") {
    const Mesh mesh = build_rect_mesh(4, 3, {{Side::top}}, Rect{0.0, 0.0, 2.0, 1.5});
    double total = 0.0;
    for (const auto& e : mesh.boundary_edges) total += e.length;
    CHECK(total == doctest::Approx(mesh.domain.perimeter()).epsilon(1e-14));
    CHECK(mesh.gamma1_measure() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("signed areas sum to the domain area and Euler characteristic is 1") {
    const Mesh mesh = build_rect_mesh(5, 7, {{Side::left}});
    CHECK(mesh.total_area() == doctest::Approx(mesh.domain.area()).epsilon(1e-12));
    const long V = static_cast<long>(mesh.vertices.size());
    const long E = static_cast<long>(mesh.unique_edges().size());
    const long F = static_cast<long>(mesh.triangles.size());
    CHECK(V - E + F == 1);
}

TEST_CASE("boundary frames are orthonormal") {
    const Mesh mesh = build_rect_mesh(3, 3, {{Side::bottom, Side::right}});
    for (const auto& e : mesh.boundary_edges) {
        CHECK(std::abs(e.normal.norm() - 1.0) <= 1e-14);
        CHECK(std::abs(e.tangent.norm() - 1.0) <= 1e-14);
        CHECK(std::abs(e.normal.dot(e.tangent)) <= 1e-14);
    }
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS_AS(build_rect_mesh(0, 2, {}), std::invalid_argument);
    CHECK_THROWS_AS(
        build_rect_mesh(2, 2, {{Side::left, Side::right, Side::top, Side::bottom}}),
        std::invalid_argument);
}

TEST_CASE("validate_mesh names a flipped triangle") {
    Mesh mesh = build_rect_mesh(2, 2, {});
    std::swap(mesh.triangles[3][0], mesh.triangles[3][1]);
    const auto report = validate_mesh(mesh);
    REQUIRE(!report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.find("triangle 3") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validate_mesh flags an untagged boundary edge") {
    Mesh mesh = build_rect_mesh(2, 2, {});
    mesh.boundary_edges.pop_back();
    const auto report = validate_mesh(mesh);
    REQUIRE(!report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.find("incomplete boundary partition") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validate_mesh flags an empty gamma0") {
    Mesh mesh = build_rect_mesh(2, 2, {{Side::bottom}});
    for (auto& e : mesh.boundary_edges) e.tag = BoundaryTag::gamma1;
    const auto report = validate_mesh(mesh);
    REQUIRE(!report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.find("gamma0 is empty") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("mesh dump lists nodes, elements and edge tags") {
    const Mesh mesh = build_rect_mesh(1, 1, {{Side::bottom}});
    std::ostringstream os;
    write_mesh_dump(mesh, os);
    const std::string dump = os.str();
    CHECK(dump.find("# vertices 4") != std::string::npos);
    CHECK(dump.find("# triangles 2") != std::string::npos);
    CHECK(dump.find("gamma1") != std::string::npos);
}
