#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace fpsi {

enum class BoundaryTag { Inlet, Outlet, Symmetry, InterfaceMinus, InterfacePlus, StructLeft, StructRight };
enum class MeshRole { Fluid, Biot };

std::string_view to_string(BoundaryTag tag);

struct Point2 {
    double x = 0;
    double y = 0;
};

struct Rect {
    double x0, x1, y0, y1;
};

struct BoundaryFacet {
    std::array<int, 2> edge;  // vertex indices
    BoundaryTag tag;
    int cell;  // owning triangle
};

struct Mesh2D {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;  // counter-clockwise
    std::vector<BoundaryFacet> boundary_facets;
    MeshRole role = MeshRole::Fluid;
    Rect rect{0, 1, 0, 1};
    int nx = 0;
    int ny = 0;

    int vertex_index(int i, int j) const { return j * (nx + 1) + i; }
    double signed_area(int tri) const;
    // Triangle containing p (boundary points resolve to a neighbouring cell).
    int locate(Point2 p) const;
};

struct Mesh1D {
    std::vector<double> vertices;
    std::vector<std::array<int, 2>> cells;

    double length(int cell) const { return vertices[cells[cell][1]] - vertices[cells[cell][0]]; }
    int locate(double x) const;
};

// Uniform nx-by-ny cell grid, each cell split along its lower-left to upper-right diagonal.
Mesh2D build_rect_mesh(int nx, int ny, Rect rect, MeshRole role);
Mesh1D build_interval_mesh(int nx, double L);

// Edges sorted by midpoint along the boundary segment.
std::vector<BoundaryFacet> facets_with_tag(const Mesh2D& mesh, BoundaryTag tag);

bool tag_valid_for_role(BoundaryTag tag, MeshRole role);

}  // namespace fpsi
