#pragma once

#include "fpsi/fem.hpp"
#include "fpsi/mesh.hpp"

#include <array>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace fpsi {

using Vec2 = std::array<double, 2>;

// Affine map of one mesh triangle onto the reference triangle.
struct TriangleMap {
    Point2 origin;
    double J[2][2];
    double Jinv[2][2];
    double det;

    TriangleMap(const Mesh2D& mesh, int tri);
    Point2 to_physical(std::array<double, 2> ref) const;
    std::array<double, 2> to_reference(Point2 p) const;
    Vec2 physical_gradient(const std::array<double, 2>& ref_grad) const;
};

// Basis values and physical gradients at a reference point of a triangle.
struct PhysicalBasis {
    std::vector<double> values;
    std::vector<Vec2> gradients;
};
PhysicalBasis physical_basis(ElementKind kind, const TriangleMap& map, std::array<double, 2> ref);

// Hermite basis on a physical interval cell of length h: values, first and second x-derivatives.
struct HermiteEval {
    std::array<double, 4> values;
    std::array<double, 4> d1;
    std::array<double, 4> d2;
};
HermiteEval hermite_physical(double s, double h);

// Vector fields are stored component-blocked: [x-component | y-component], each of size dofs.n_dofs.
TripletList vector_mass(const Mesh2D& mesh, const DofMap& vel, int order = kDefaultTriangleOrder);
// (2 D(u), D(phi))
TripletList strain_form(const Mesh2D& mesh, const DofMap& vel, int order = kDefaultTriangleOrder);
// (div u, div phi)
TripletList div_div_form(const Mesh2D& mesh, const DofMap& vel, int order = kDefaultTriangleOrder);
// rows: scalar test s, cols: vector trial; entries (s, div u)
TripletList divergence_form(const Mesh2D& mesh, const DofMap& vel, const DofMap& pres, int order = kDefaultTriangleOrder);
TripletList scalar_mass(const Mesh2D& mesh, const DofMap& dofs, int order = kDefaultTriangleOrder);
TripletList scalar_stiffness(const Mesh2D& mesh, const DofMap& dofs, int order = kDefaultTriangleOrder);

// Integral of g . phi over all facets with the given tag, for every vector test function.
std::vector<double> boundary_load(const Mesh2D& mesh, const DofMap& vel, BoundaryTag tag,
                                  const std::function<Vec2(double x, double y)>& g, int order = kDefaultIntervalOrder);

// Evaluation of finite-element fields at physical points.
double eval_scalar(const Mesh2D& mesh, const DofMap& dofs, std::span<const double> coeffs, Point2 p);
Vec2 eval_vector(const Mesh2D& mesh, const DofMap& dofs, std::span<const double> coeffs, Point2 p);
double eval_hermite(const Mesh1D& mesh, std::span<const double> coeffs, double x, int derivative = 0);
double eval_p1_interval(const Mesh1D& mesh, std::span<const double> coeffs, double x);

// Copies a block (or its transpose) into a global triplet list with its top-left corner at
// (row_offset, col_offset).
void add_block(TripletList& out, const CsrMatrix& block, int row_offset, int col_offset, double scale = 1.0,
               bool transposed = false);

// Strong Dirichlet rows/columns. Constrained rows become identity rows; their columns move into
// a lifting matrix so that rhs -= lift * g keeps the free equations exact.
struct ConstrainedOperator {
    CsrMatrix matrix;
    CsrMatrix lift;
    std::map<int, double> constrained;

    void apply_to_rhs(std::vector<double>& rhs) const;
};
ConstrainedOperator apply_constraints(int n, const TripletList& raw, const std::map<int, double>& constrained);

}  // namespace fpsi
