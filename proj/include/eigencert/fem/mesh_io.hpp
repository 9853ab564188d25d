#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "eigencert/core/error.hpp"
#include "eigencert/fem/mesh.hpp"

namespace eigencert::fem {

// Plain-text mesh format, versioned:
//   # eigencert mesh format v1
//   vertices <nE> <nV>
//   <x> <y>            (nV lines)
//   <v0> <v1> <v2>     (nE lines, peak first)
//   <flag>             (nV lines, 1 = boundary vertex)
inline void write_mesh(const TriMesh& mesh, std::ostream& out) {
    out << "# eigencert mesh format v1\n";
    out << "vertices " << mesh.triangle_count() << ' ' << mesh.vertex_count() << '\n';
    out.precision(17);
    for (const auto& p : mesh.vertices) out << p[0] << ' ' << p[1] << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
        out << (mesh.boundary_vertex[v] ? 1 : 0) << '\n';
}

inline void write_mesh_file(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    write_mesh(mesh, out);
}

inline TriMesh read_mesh(std::istream& in) {
    std::string line;
    std::getline(in, line);
    if (line.rfind("# eigencert mesh format v1", 0) != 0)
        throw IoError("unknown mesh format header: " + line);
    std::string tag;
    std::size_t ne = 0, nv = 0;
    in >> tag >> ne >> nv;
    if (tag != "vertices") throw IoError("malformed mesh header line");
    TriMesh mesh;
    mesh.vertices.resize(nv);
    for (auto& p : mesh.vertices) in >> p[0] >> p[1];
    mesh.triangles.resize(ne);
    for (auto& t : mesh.triangles) in >> t[0] >> t[1] >> t[2];
    std::vector<bool> flags(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        int f = 0;
        in >> f;
        flags[v] = (f != 0);
    }
    if (!in) throw IoError("truncated mesh file");
    mesh.finalize();
    return mesh;
}

inline TriMesh read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_mesh(in);
}

// Per-element indicator export for plotting.
inline void write_indicator_csv(const TriMesh& mesh, const std::vector<double>& per_element,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "element,cx,cy,area,eta_sq\n";
    out.precision(17);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double cx = (mesh.vertices[tri[0]][0] + mesh.vertices[tri[1]][0] +
                           mesh.vertices[tri[2]][0]) /
                          3.0;
        const double cy = (mesh.vertices[tri[0]][1] + mesh.vertices[tri[1]][1] +
                           mesh.vertices[tri[2]][1]) /
                          3.0;
        out << t << ',' << cx << ',' << cy << ',' << mesh.area(t) << ','
            << (t < per_element.size() ? per_element[t] : 0.0) << '\n';
    }
}

} // namespace eigencert::fem
