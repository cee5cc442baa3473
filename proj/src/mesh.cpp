#include "fpsi/mesh.hpp"

#include "fpsi/error.hpp"

#include <algorithm>
#include <cmath>

namespace fpsi {

std::string_view to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::Inlet: return "Inlet";
        case BoundaryTag::Outlet: return "Outlet";
        case BoundaryTag::Symmetry: return "Symmetry";
        case BoundaryTag::InterfaceMinus: return "InterfaceMinus";
        case BoundaryTag::InterfacePlus: return "InterfacePlus";
        case BoundaryTag::StructLeft: return "StructLeft";
        case BoundaryTag::StructRight: return "StructRight";
    }
    return "?";
}

bool tag_valid_for_role(BoundaryTag tag, MeshRole role) {
    switch (tag) {
        case BoundaryTag::Inlet:
        case BoundaryTag::Outlet:
        case BoundaryTag::Symmetry: return role == MeshRole::Fluid;
        case BoundaryTag::InterfaceMinus: return true;
        case BoundaryTag::InterfacePlus:
        case BoundaryTag::StructLeft:
        case BoundaryTag::StructRight: return role == MeshRole::Biot;
    }
    return false;
}

double Mesh2D::signed_area(int tri) const {
    const auto& t = triangles[tri];
    const auto a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

namespace {

// Exact grid coordinate: endpoints hit x0 and x1 bit-for-bit, interior points use the same formula
// for every mesh built with the same (n, x0, x1).
double grid_coord(double x0, double x1, int i, int n) {
    if (i == 0) return x0;
    if (i == n) return x1;
    return x0 + (x1 - x0) * (static_cast<double>(i) / n);
}

int clamp_cell(double s, int n) { return std::clamp(static_cast<int>(std::floor(s)), 0, n - 1); }

}  // namespace

int Mesh2D::locate(Point2 p) const {
    const double sx = (p.x - rect.x0) / (rect.x1 - rect.x0) * nx;
    const double sy = (p.y - rect.y0) / (rect.y1 - rect.y0) * ny;
    const int i = clamp_cell(sx, nx), j = clamp_cell(sy, ny);
    const double fx = sx - i, fy = sy - j;
    const int cell = 2 * (j * nx + i);
    return fy <= fx ? cell : cell + 1;
}

int Mesh1D::locate(double x) const {
    auto it = std::upper_bound(vertices.begin(), vertices.end(), x);
    const int idx = static_cast<int>(it - vertices.begin()) - 1;
    return std::clamp(idx, 0, static_cast<int>(cells.size()) - 1);
}

Mesh2D build_rect_mesh(int nx, int ny, Rect r, MeshRole role) {
    if (nx < 1 || ny < 1) throw ValidationError("mesh needs at least one cell per direction");
    if (!(r.x0 < r.x1) || !(r.y0 < r.y1)) throw ValidationError("invalid rectangle");
    Mesh2D m;
    m.role = role;
    m.rect = r;
    m.nx = nx;
    m.ny = ny;
    m.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) m.vertices.push_back({grid_coord(r.x0, r.x1, i, nx), grid_coord(r.y0, r.y1, j, ny)});

    m.triangles.reserve(2 * static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = m.vertex_index(i, j), v10 = m.vertex_index(i + 1, j);
            const int v01 = m.vertex_index(i, j + 1), v11 = m.vertex_index(i + 1, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    }

    const bool fluid = role == MeshRole::Fluid;
    const BoundaryTag bottom = fluid ? BoundaryTag::Symmetry : BoundaryTag::InterfaceMinus;
    const BoundaryTag top = fluid ? BoundaryTag::InterfaceMinus : BoundaryTag::InterfacePlus;
    const BoundaryTag left = fluid ? BoundaryTag::Inlet : BoundaryTag::StructLeft;
    const BoundaryTag right = fluid ? BoundaryTag::Outlet : BoundaryTag::StructRight;
    for (int i = 0; i < nx; ++i) {
        m.boundary_facets.push_back({{m.vertex_index(i, 0), m.vertex_index(i + 1, 0)}, bottom, 2 * i});
        m.boundary_facets.push_back({{m.vertex_index(i + 1, ny), m.vertex_index(i, ny)}, top, 2 * ((ny - 1) * nx + i) + 1});
    }
    for (int j = 0; j < ny; ++j) {
        m.boundary_facets.push_back({{m.vertex_index(0, j + 1), m.vertex_index(0, j)}, left, 2 * (j * nx) + 1});
        m.boundary_facets.push_back({{m.vertex_index(nx, j), m.vertex_index(nx, j + 1)}, right, 2 * (j * nx + nx - 1)});
    }
    return m;
}

Mesh1D build_interval_mesh(int nx, double L) {
    if (nx < 1) throw ValidationError("interval mesh needs at least one cell");
    if (!(L > 0)) throw ValidationError("interval length must be positive");
    Mesh1D m;
    m.vertices.resize(nx + 1);
    for (int i = 0; i <= nx; ++i) m.vertices[i] = grid_coord(0.0, L, i, nx);
    for (int i = 0; i < nx; ++i) m.cells.push_back({i, i + 1});
    return m;
}

std::vector<BoundaryFacet> facets_with_tag(const Mesh2D& mesh, BoundaryTag tag) {
    if (!tag_valid_for_role(tag, mesh.role)) throw ValidationError("tag " + std::string(to_string(tag)) + " not valid for this mesh role");
    std::vector<BoundaryFacet> out;
    for (const auto& f : mesh.boundary_facets)
        if (f.tag == tag) out.push_back(f);
    auto key = [&](const BoundaryFacet& f) {
        const auto a = mesh.vertices[f.edge[0]], b = mesh.vertices[f.edge[1]];
        return std::pair{a.x + b.x, a.y + b.y};
    };
    std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    return out;
}

}  // namespace fpsi
