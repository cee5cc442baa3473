#pragma once

#include "fpsi/mesh.hpp"

#include <array>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace fpsi {

enum class ElementKind { P1Tri, P2Tri, P1Int, HermiteInt, DG0Int };
enum class CellShape { Triangle, Interval };

int arity(ElementKind kind);
bool is_interval_kind(ElementKind kind);

// Reference triangle: (0,0), (1,0), (0,1). Reference interval: [0, 1].
// P2 local order: three vertices, then midpoints of edges (0,1), (1,2), (2,0).
// Hermite local order: value at 0, slope at 0, value at 1, slope at 1 (unit cell length).
struct BasisEval {
    std::vector<double> values;
    std::vector<std::array<double, 2>> gradients;  // interval kinds use component 0 only
    std::vector<double> second_derivatives;         // HermiteInt only
};

BasisEval reference_basis(ElementKind kind, std::array<double, 2> point);

struct QuadratureRule {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
    int order = 0;
};

constexpr int kDefaultTriangleOrder = 4;
constexpr int kDefaultIntervalOrder = 6;

QuadratureRule quadrature_rule(CellShape cell, int order);

// n-point Gauss-Legendre rule on [0, 1].
QuadratureRule gauss_legendre(int n);

struct ConstraintSpec {
    std::vector<BoundaryTag> tags;  // 2D: every DOF on these facets is fixed to 0
    bool clamp_ends = false;        // 1D: every DOF attached to x = 0 and x = L is fixed to 0
};

struct DofMap {
    ElementKind kind = ElementKind::P1Tri;
    int n_cells = 0;
    int n_dofs = 0;
    std::vector<int> cell_dofs;                 // n_cells * arity(kind)
    std::map<int, double> constrained;          // dof -> prescribed value
    std::vector<Point2> coords;                 // DOF support points (x only for interval kinds)
    std::map<std::pair<int, int>, int> edge_dof;  // P2: sorted vertex pair -> DOF

    std::span<const int> cell(int c) const {
        const int a = arity(kind);
        return {cell_dofs.data() + static_cast<std::size_t>(c) * a, static_cast<std::size_t>(a)};
    }
    bool is_constrained(int dof) const { return constrained.contains(dof); }
    // DOFs lying on a boundary facet: endpoints first, then the P2 midpoint if any.
    std::vector<int> facet_dofs(const BoundaryFacet& facet) const;
};

DofMap build_dof_map(const Mesh2D& mesh, ElementKind kind, const ConstraintSpec& constraints = {});
DofMap build_dof_map(const Mesh1D& mesh, ElementKind kind, const ConstraintSpec& constraints = {});

struct Triplet {
    int row;
    int col;
    double value;
};

class TripletList {
public:
    void add(int row, int col, double value) { entries_.push_back({row, col, value}); }
    void append(const TripletList& other) { entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end()); }
    const std::vector<Triplet>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    void reserve(std::size_t n) { entries_.reserve(n); }

private:
    std::vector<Triplet> entries_;
};

class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(int rows, int cols);
    // Duplicates are summed in insertion order, so the result is independent of how the list was split.
    static CsrMatrix from_triplets(int rows, int cols, const TripletList& triplets);
    static CsrMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }
    const std::vector<int>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double at(int row, int col) const;
    std::vector<double> multiply(std::span<const double> x) const;
    void multiply_add(std::span<const double> x, std::span<double> y, double scale = 1.0) const;
    CsrMatrix transpose() const;
    double quadratic_form(std::span<const double> x) const;
    double bilinear_form(std::span<const double> x, std::span<const double> y) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_offsets_{0};
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

// Thread count for element loops: FPSI_NUM_THREADS if set, else 1.
int assembly_threads();

// Runs body(cell, local_triplets) over [0, n_cells) split into contiguous chunks; chunks are
// concatenated in cell order, so the assembled matrix is bitwise independent of the thread count.
TripletList assemble_cells(int n_cells, const std::function<void(int, TripletList&)>& body);

}  // namespace fpsi
