#include "bouss/export.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

namespace bouss {

namespace {

void put17(std::ostream& os, double v, char sep) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf << sep;
}

// vertex-sampled fields: velocity is P2 but vertices are P2 nodes too
struct VertexFields {
    Vec2 u;
    double p, theta;
};

VertexFields at_vertex(const FieldState& state, const Eigen::VectorXd& u_full,
                       const Eigen::VectorXd& th_full, int v) {
    VertexFields f;
    f.u = Vec2(u_full[2 * v], u_full[2 * v + 1]);
    f.p = state.p.size() > static_cast<Eigen::Index>(v) ? state.p[v] : 0.0;
    f.theta = th_full[v];
    return f;
}

}  // namespace

void export_fields_csv(const FieldState& state, const DiscreteSpaces& sp, std::ostream& os) {
    const Eigen::VectorXd u_full = sp.expand_velocity(state.u);
    const Eigen::VectorXd th_full = sp.expand_temperature(state.theta);
    os << "x,y,u1,u2,p,theta\n";
    for (int v = 0; v < sp.n_vertices; ++v) {
        const auto f = at_vertex(state, u_full, th_full, v);
        put17(os, sp.mesh.vertices[v].x(), ',');
        put17(os, sp.mesh.vertices[v].y(), ',');
        put17(os, f.u.x(), ',');
        put17(os, f.u.y(), ',');
        put17(os, f.p, ',');
        put17(os, f.theta, '\n');
    }
}

void export_fields_vtu(const FieldState& state, const DiscreteSpaces& sp, std::ostream& os) {
    const Eigen::VectorXd u_full = sp.expand_velocity(state.u);
    const Eigen::VectorXd th_full = sp.expand_temperature(state.theta);
    const int nv = sp.n_vertices;
    const int nt = static_cast<int>(sp.mesh.triangles.size());
    os << "<?xml version=\"1.0\"?>\n"
       << "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n"
       << "<UnstructuredGrid>\n"
       << "<Piece NumberOfPoints=\"" << nv << "\" NumberOfCells=\"" << nt << "\">\n";
    os << "<Points><DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
    for (int v = 0; v < nv; ++v) {
        put17(os, sp.mesh.vertices[v].x(), ' ');
        put17(os, sp.mesh.vertices[v].y(), ' ');
        os << "0\n";
    }
    os << "</DataArray></Points>\n";
    os << "<Cells><DataArray type=\"Int32\" Name=\"connectivity\" format=\"ascii\">\n";
    for (const auto& tri : sp.mesh.triangles)
        os << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    os << "</DataArray><DataArray type=\"Int32\" Name=\"offsets\" format=\"ascii\">\n";
    for (int t = 1; t <= nt; ++t) os << 3 * t << "\n";
    os << "</DataArray><DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
    for (int t = 0; t < nt; ++t) os << "5\n";
    os << "</DataArray></Cells>\n";
    os << "<PointData Scalars=\"theta\" Vectors=\"velocity\">\n";
    os << "<DataArray type=\"Float64\" Name=\"velocity\" NumberOfComponents=\"3\" "
          "format=\"ascii\">\n";
    for (int v = 0; v < nv; ++v) {
        put17(os, u_full[2 * v], ' ');
        put17(os, u_full[2 * v + 1], ' ');
        os << "0\n";
    }
    os << "</DataArray>\n<DataArray type=\"Float64\" Name=\"pressure\" format=\"ascii\">\n";
    for (int v = 0; v < nv; ++v) put17(os, state.p.size() > static_cast<Eigen::Index>(v) ? state.p[v] : 0.0, '\n');
    os << "</DataArray>\n<DataArray type=\"Float64\" Name=\"theta\" format=\"ascii\">\n";
    for (int v = 0; v < nv; ++v) put17(os, th_full[v], '\n');
    os << "</DataArray>\n</PointData>\n</Piece>\n</UnstructuredGrid>\n</VTKFile>\n";
}

std::string export_fields(const FieldState& state, const DiscreteSpaces& sp,
                          const std::string& dir, const std::string& stem,
                          const std::string& format) {
    std::filesystem::create_directories(dir);
    const std::string name = stem + (format == "vtu" ? ".vtu" : ".csv");
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    if (format == "vtu")
        export_fields_vtu(state, sp, out);
    else
        export_fields_csv(state, sp, out);
    return name;
}

}  // namespace bouss
