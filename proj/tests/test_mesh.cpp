#include "fpsi/error.hpp"
#include "fpsi/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <random>

using namespace fpsi;

namespace {

double edge_length(const Mesh2D& m, const BoundaryFacet& f) {
    const auto a = m.vertices[f.edge[0]], b = m.vertices[f.edge[1]];
    return std::hypot(b.x - a.x, b.y - a.y);
}

}  // namespace

TEST(Mesh, SingleCell) {
    const auto m = build_rect_mesh(1, 1, {0, 1, 0, 1}, MeshRole::Fluid);
    EXPECT_EQ(m.vertices.size(), 4u);
    EXPECT_EQ(m.triangles.size(), 2u);
    EXPECT_EQ(m.boundary_facets.size(), 4u);
    for (auto tag : {BoundaryTag::Inlet, BoundaryTag::Outlet, BoundaryTag::Symmetry, BoundaryTag::InterfaceMinus})
        EXPECT_EQ(facets_with_tag(m, tag).size(), 1u);
    const auto b = build_rect_mesh(1, 1, {0, 1, 0, 1}, MeshRole::Biot);
    for (auto tag : {BoundaryTag::StructLeft, BoundaryTag::StructRight, BoundaryTag::InterfaceMinus, BoundaryTag::InterfacePlus})
        EXPECT_EQ(facets_with_tag(b, tag).size(), 1u);
}

TEST(Mesh, FullResolutionGridCounts) {
    const auto f = build_rect_mesh(300, 25, {0, 5, -0.5, 0}, MeshRole::Fluid);
    EXPECT_EQ(f.vertices.size(), 7826u);
    EXPECT_EQ(f.triangles.size(), 2u * 300 * 25);
    const auto b = build_rect_mesh(300, 3, {0, 5, 0, 0.01}, MeshRole::Biot);
    EXPECT_EQ(b.vertices.size(), 301u * 4);
}

TEST(Mesh, TaggedLengths) {
    const auto f = build_rect_mesh(300, 25, {0, 5, -0.5, 0}, MeshRole::Fluid);
    const auto top = facets_with_tag(f, BoundaryTag::InterfaceMinus);
    ASSERT_EQ(top.size(), 300u);
    double len = 0;
    for (const auto& e : top) len += edge_length(f, e);
    EXPECT_NEAR(len, 5.0, 1e-12);
    const auto inlet = facets_with_tag(f, BoundaryTag::Inlet);
    ASSERT_EQ(inlet.size(), 25u);
    len = 0;
    for (const auto& e : inlet) len += edge_length(f, e);
    EXPECT_NEAR(len, 0.5, 1e-13);
    for (const auto& e : top) {
        EXPECT_EQ(f.vertices[e.edge[0]].y, 0.0);
        EXPECT_EQ(f.vertices[e.edge[1]].y, 0.0);
    }
}

TEST(Mesh, FacetsSortedByMidpoint) {
    const auto f = build_rect_mesh(7, 5, {0, 2, -1, 0}, MeshRole::Fluid);
    const auto top = facets_with_tag(f, BoundaryTag::InterfaceMinus);
    for (std::size_t i = 1; i < top.size(); ++i) {
        const double a = f.vertices[top[i - 1].edge[0]].x + f.vertices[top[i - 1].edge[1]].x;
        const double b = f.vertices[top[i].edge[0]].x + f.vertices[top[i].edge[1]].x;
        EXPECT_LT(a, b);
    }
    const auto inlet = facets_with_tag(f, BoundaryTag::Inlet);
    for (std::size_t i = 1; i < inlet.size(); ++i) {
        const double a = f.vertices[inlet[i - 1].edge[0]].y + f.vertices[inlet[i - 1].edge[1]].y;
        const double b = f.vertices[inlet[i].edge[0]].y + f.vertices[inlet[i].edge[1]].y;
        EXPECT_LT(a, b);
    }
}

TEST(Mesh, RoleTagsAndErrors) {
    const auto f = build_rect_mesh(2, 2, {0, 1, 0, 1}, MeshRole::Fluid);
    EXPECT_THROW(facets_with_tag(f, BoundaryTag::InterfacePlus), ValidationError);
    EXPECT_THROW(facets_with_tag(f, BoundaryTag::StructLeft), ValidationError);
    const auto b = build_rect_mesh(2, 2, {0, 1, 0, 1}, MeshRole::Biot);
    EXPECT_THROW(facets_with_tag(b, BoundaryTag::Inlet), ValidationError);
    for (const auto& fc : f.boundary_facets) EXPECT_TRUE(tag_valid_for_role(fc.tag, MeshRole::Fluid));
    EXPECT_THROW(build_rect_mesh(0, 1, {0, 1, 0, 1}, MeshRole::Fluid), ValidationError);
    EXPECT_THROW(build_rect_mesh(1, 1, {1, 0, 0, 1}, MeshRole::Fluid), ValidationError);
    EXPECT_THROW(build_interval_mesh(0, 1.0), ValidationError);
    EXPECT_THROW(build_interval_mesh(1, 0.0), ValidationError);
}

TEST(Mesh, IntervalMesh) {
    const auto one = build_interval_mesh(1, 5.0);
    EXPECT_EQ(one.vertices, (std::vector<double>{0.0, 5.0}));
    const auto m = build_interval_mesh(300, 5.0);
    ASSERT_EQ(m.vertices.size(), 301u);
    EXPECT_EQ(m.vertices.front(), 0.0);
    EXPECT_EQ(m.vertices.back(), 5.0);
    for (int c = 0; c < 300; ++c) EXPECT_NEAR(m.length(c), 1.0 / 60, 1e-14);
}

TEST(Mesh, IntervalMatchesFluidTopRowBitwise) {
    for (int nx : {1, 3, 150, 300}) {
        const auto f = build_rect_mesh(nx, 4, {0, 5, -0.5, 0}, MeshRole::Fluid);
        const auto g = build_interval_mesh(nx, 5.0);
        for (int i = 0; i <= nx; ++i) {
            const double a = f.vertices[f.vertex_index(i, 4)].x, b = g.vertices[i];
            EXPECT_EQ(std::memcmp(&a, &b, sizeof(double)), 0) << "nx=" << nx << " i=" << i;
        }
    }
}

TEST(Mesh, RandomRectanglesProperties) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> n(1, 12);
    std::uniform_real_distribution<double> c(-3, 3), w(0.1, 4);
    for (int trial = 0; trial < 30; ++trial) {
        const double x0 = c(rng), y0 = c(rng);
        const Rect r{x0, x0 + w(rng), y0, y0 + w(rng)};
        const int nx = n(rng), ny = n(rng);
        const auto role = trial % 2 ? MeshRole::Biot : MeshRole::Fluid;
        const auto m = build_rect_mesh(nx, ny, r, role);
        ASSERT_EQ(m.vertices.size(), static_cast<std::size_t>((nx + 1) * (ny + 1)));
        ASSERT_EQ(m.triangles.size(), static_cast<std::size_t>(2 * nx * ny));

        double area = 0;
        for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
            EXPECT_GT(m.signed_area(t), 0.0);
            area += m.signed_area(t);
        }
        const double exact = (r.x1 - r.x0) * (r.y1 - r.y0);
        EXPECT_NEAR(area, exact, 1e-12 * exact);

        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& t : m.triangles)
            for (int k = 0; k < 3; ++k) {
                const int a = t[k], b = t[(k + 1) % 3];
                ++edge_count[{std::min(a, b), std::max(a, b)}];
            }
        std::map<std::pair<int, int>, int> boundary;
        for (const auto& f : m.boundary_facets) {
            EXPECT_TRUE(tag_valid_for_role(f.tag, role));
            ++boundary[{std::min(f.edge[0], f.edge[1]), std::max(f.edge[0], f.edge[1])}];
        }
        EXPECT_EQ(m.boundary_facets.size(), static_cast<std::size_t>(2 * (nx + ny)));
        for (const auto& [e, count] : edge_count) {
            if (boundary.contains(e)) {
                EXPECT_EQ(count, 1);
                EXPECT_EQ(boundary[e], 1);
            } else {
                EXPECT_EQ(count, 2);
            }
        }

        const auto g = build_interval_mesh(nx, r.x1 - r.x0);
        const auto iface = facets_with_tag(m, BoundaryTag::InterfaceMinus);
        std::vector<double> xs;
        for (const auto& f : iface) {
            xs.push_back(m.vertices[f.edge[0]].x - r.x0);
            xs.push_back(m.vertices[f.edge[1]].x - r.x0);
            const double y = role == MeshRole::Fluid ? r.y1 : r.y0;
            EXPECT_EQ(m.vertices[f.edge[0]].y, y);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), xs.end());
        ASSERT_EQ(xs.size(), g.vertices.size());
        for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(xs[i], g.vertices[i], 1e-12);
    }
}

TEST(Mesh, Locate) {
    const auto m = build_rect_mesh(4, 3, {0, 2, -1, 0}, MeshRole::Fluid);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ux(0, 2), uy(-1, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const Point2 p{ux(rng), uy(rng)};
        const int t = m.locate(p);
        ASSERT_GE(t, 0);
        const auto& tri = m.triangles[t];
        auto cross = [&](int a, int b) {
            const auto A = m.vertices[tri[a]], B = m.vertices[tri[b]];
            return (B.x - A.x) * (p.y - A.y) - (B.y - A.y) * (p.x - A.x);
        };
        EXPECT_GE(cross(0, 1), -1e-12);
        EXPECT_GE(cross(1, 2), -1e-12);
        EXPECT_GE(cross(2, 0), -1e-12);
    }
    const auto g = build_interval_mesh(10, 5.0);
    EXPECT_EQ(g.locate(0.0), 0);
    EXPECT_EQ(g.locate(5.0), 9);
    EXPECT_EQ(g.locate(1.25), 2);
}
