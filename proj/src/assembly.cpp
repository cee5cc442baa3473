#include "fpsi/assembly.hpp"

#include "fpsi/error.hpp"

#include <cmath>

namespace fpsi {

TriangleMap::TriangleMap(const Mesh2D& mesh, int tri) {
    const auto& t = mesh.triangles[tri];
    const auto a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    origin = a;
    J[0][0] = b.x - a.x;
    J[0][1] = c.x - a.x;
    J[1][0] = b.y - a.y;
    J[1][1] = c.y - a.y;
    det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    Jinv[0][0] = J[1][1] / det;
    Jinv[0][1] = -J[0][1] / det;
    Jinv[1][0] = -J[1][0] / det;
    Jinv[1][1] = J[0][0] / det;
}

Point2 TriangleMap::to_physical(std::array<double, 2> r) const {
    return {origin.x + J[0][0] * r[0] + J[0][1] * r[1], origin.y + J[1][0] * r[0] + J[1][1] * r[1]};
}

std::array<double, 2> TriangleMap::to_reference(Point2 p) const {
    const double dx = p.x - origin.x, dy = p.y - origin.y;
    return {Jinv[0][0] * dx + Jinv[0][1] * dy, Jinv[1][0] * dx + Jinv[1][1] * dy};
}

Vec2 TriangleMap::physical_gradient(const std::array<double, 2>& g) const {
    return {Jinv[0][0] * g[0] + Jinv[1][0] * g[1], Jinv[0][1] * g[0] + Jinv[1][1] * g[1]};
}

PhysicalBasis physical_basis(ElementKind kind, const TriangleMap& map, std::array<double, 2> ref) {
    const auto e = reference_basis(kind, ref);
    PhysicalBasis out;
    out.values = e.values;
    out.gradients.reserve(e.gradients.size());
    for (const auto& g : e.gradients) out.gradients.push_back(map.physical_gradient(g));
    return out;
}

HermiteEval hermite_physical(double s, double h) {
    const auto e = reference_basis(ElementKind::HermiteInt, {s, 0});
    HermiteEval out;
    const double scale[4] = {1, h, 1, h};
    for (int k = 0; k < 4; ++k) {
        out.values[k] = scale[k] * e.values[k];
        out.d1[k] = scale[k] * e.gradients[k][0] / h;
        out.d2[k] = scale[k] * e.second_derivatives[k] / (h * h);
    }
    return out;
}

namespace {

// Generic element loop: kernel(basis, w, local) fills the local matrix contributions.
template <class Kernel>
TripletList element_loop(const Mesh2D& mesh, const DofMap& row_dofs, const DofMap& col_dofs, int row_comp, int col_comp,
                         int order, Kernel kernel) {
    const auto rule = quadrature_rule(CellShape::Triangle, order);
    const int nr = arity(row_dofs.kind), nc = arity(col_dofs.kind);
    const int row_n = row_dofs.n_dofs, col_n = col_dofs.n_dofs;
    return assemble_cells(static_cast<int>(mesh.triangles.size()), [&](int tri, TripletList& out) {
        const TriangleMap map(mesh, tri);
        const double area_scale = std::abs(map.det);
        std::vector<double> local(static_cast<std::size_t>(row_comp * nr) * col_comp * nc, 0.0);
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const auto rb = physical_basis(row_dofs.kind, map, rule.points[q]);
            const auto cb = physical_basis(col_dofs.kind, map, rule.points[q]);
            kernel(rb, cb, rule.weights[q] * area_scale, local);
        }
        const auto rd = row_dofs.cell(tri);
        const auto cd = col_dofs.cell(tri);
        const int ncols = col_comp * nc;
        for (int a = 0; a < row_comp; ++a)
            for (int i = 0; i < nr; ++i)
                for (int b = 0; b < col_comp; ++b)
                    for (int j = 0; j < nc; ++j)
                        out.add(a * row_n + rd[i], b * col_n + cd[j], local[(a * nr + i) * ncols + b * nc + j]);
    });
}

}  // namespace

TripletList vector_mass(const Mesh2D& mesh, const DofMap& vel, int order) {
    const int n = arity(vel.kind);
    return element_loop(mesh, vel, vel, 2, 2, order, [n](const PhysicalBasis& r, const PhysicalBasis& c, double w, std::vector<double>& loc) {
        for (int a = 0; a < 2; ++a)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) loc[(a * n + i) * 2 * n + a * n + j] += w * r.values[i] * c.values[j];
    });
}

TripletList strain_form(const Mesh2D& mesh, const DofMap& vel, int order) {
    const int n = arity(vel.kind);
    return element_loop(mesh, vel, vel, 2, 2, order, [n](const PhysicalBasis& r, const PhysicalBasis& c, double w, std::vector<double>& loc) {
        // 2 D(e_b psi_j) : D(e_a psi_i) = delta_ab grad psi_i . grad psi_j + d_b psi_i d_a psi_j
        for (int a = 0; a < 2; ++a)
            for (int i = 0; i < n; ++i)
                for (int b = 0; b < 2; ++b)
                    for (int j = 0; j < n; ++j) {
                        const auto& gi = r.gradients[i];
                        const auto& gj = c.gradients[j];
                        double v = gi[b] * gj[a];
                        if (a == b) v += gi[0] * gj[0] + gi[1] * gj[1];
                        loc[(a * n + i) * 2 * n + b * n + j] += w * v;
                    }
    });
}

TripletList div_div_form(const Mesh2D& mesh, const DofMap& vel, int order) {
    const int n = arity(vel.kind);
    return element_loop(mesh, vel, vel, 2, 2, order, [n](const PhysicalBasis& r, const PhysicalBasis& c, double w, std::vector<double>& loc) {
        for (int a = 0; a < 2; ++a)
            for (int i = 0; i < n; ++i)
                for (int b = 0; b < 2; ++b)
                    for (int j = 0; j < n; ++j) loc[(a * n + i) * 2 * n + b * n + j] += w * r.gradients[i][a] * c.gradients[j][b];
    });
}

TripletList divergence_form(const Mesh2D& mesh, const DofMap& vel, const DofMap& pres, int order) {
    const int n = arity(vel.kind), m = arity(pres.kind);
    return element_loop(mesh, pres, vel, 1, 2, order, [n, m](const PhysicalBasis& r, const PhysicalBasis& c, double w, std::vector<double>& loc) {
        for (int i = 0; i < m; ++i)
            for (int b = 0; b < 2; ++b)
                for (int j = 0; j < n; ++j) loc[i * 2 * n + b * n + j] += w * r.values[i] * c.gradients[j][b];
    });
}

TripletList scalar_mass(const Mesh2D& mesh, const DofMap& dofs, int order) {
    const int n = arity(dofs.kind);
    return element_loop(mesh, dofs, dofs, 1, 1, order, [n](const PhysicalBasis& r, const PhysicalBasis& c, double w, std::vector<double>& loc) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) loc[i * n + j] += w * r.values[i] * c.values[j];
    });
}

TripletList scalar_stiffness(const Mesh2D& mesh, const DofMap& dofs, int order) {
    const int n = arity(dofs.kind);
    return element_loop(mesh, dofs, dofs, 1, 1, order, [n](const PhysicalBasis& r, const PhysicalBasis& c, double w, std::vector<double>& loc) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                loc[i * n + j] += w * (r.gradients[i][0] * c.gradients[j][0] + r.gradients[i][1] * c.gradients[j][1]);
    });
}

std::vector<double> boundary_load(const Mesh2D& mesh, const DofMap& vel, BoundaryTag tag,
                                  const std::function<Vec2(double, double)>& g, int order) {
    const int nu = vel.n_dofs;
    std::vector<double> out(2 * static_cast<std::size_t>(nu), 0.0);
    const auto rule = quadrature_rule(CellShape::Interval, order);
    for (const auto& f : facets_with_tag(mesh, tag)) {
        const TriangleMap map(mesh, f.cell);
        const auto a = mesh.vertices[f.edge[0]], b = mesh.vertices[f.edge[1]];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const auto dofs = vel.cell(f.cell);
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const double s = rule.points[q][0];
            const Point2 p{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
            const auto basis = reference_basis(vel.kind, map.to_reference(p));
            const Vec2 gv = g(p.x, p.y);
            const double w = rule.weights[q] * len;
            for (std::size_t i = 0; i < dofs.size(); ++i) {
                out[dofs[i]] += w * gv[0] * basis.values[i];
                out[nu + dofs[i]] += w * gv[1] * basis.values[i];
            }
        }
    }
    return out;
}

double eval_scalar(const Mesh2D& mesh, const DofMap& dofs, std::span<const double> coeffs, Point2 p) {
    const int tri = mesh.locate(p);
    const TriangleMap map(mesh, tri);
    auto ref = map.to_reference(p);
    ref[0] = std::max(ref[0], 0.0);
    ref[1] = std::max(ref[1], 0.0);
    const auto e = reference_basis(dofs.kind, ref);
    const auto cd = dofs.cell(tri);
    double v = 0;
    for (std::size_t i = 0; i < cd.size(); ++i) v += coeffs[cd[i]] * e.values[i];
    return v;
}

Vec2 eval_vector(const Mesh2D& mesh, const DofMap& dofs, std::span<const double> coeffs, Point2 p) {
    const auto n = static_cast<std::size_t>(dofs.n_dofs);
    return {eval_scalar(mesh, dofs, coeffs.subspan(0, n), p), eval_scalar(mesh, dofs, coeffs.subspan(n, n), p)};
}

double eval_hermite(const Mesh1D& mesh, std::span<const double> coeffs, double x, int derivative) {
    const int c = mesh.locate(x);
    const double x0 = mesh.vertices[mesh.cells[c][0]];
    const double h = mesh.length(c);
    const double s = std::clamp((x - x0) / h, 0.0, 1.0);
    const auto e = hermite_physical(s, h);
    const auto& basis = derivative == 0 ? e.values : derivative == 1 ? e.d1 : e.d2;
    const int i0 = mesh.cells[c][0], i1 = mesh.cells[c][1];
    return coeffs[2 * i0] * basis[0] + coeffs[2 * i0 + 1] * basis[1] + coeffs[2 * i1] * basis[2] + coeffs[2 * i1 + 1] * basis[3];
}

double eval_p1_interval(const Mesh1D& mesh, std::span<const double> coeffs, double x) {
    const int c = mesh.locate(x);
    const int i0 = mesh.cells[c][0], i1 = mesh.cells[c][1];
    const double s = std::clamp((x - mesh.vertices[i0]) / mesh.length(c), 0.0, 1.0);
    return (1 - s) * coeffs[i0] + s * coeffs[i1];
}

void add_block(TripletList& out, const CsrMatrix& block, int row_offset, int col_offset, double scale, bool transposed) {
    if (scale == 0.0) return;
    const auto& off = block.row_offsets();
    const auto& cols = block.col_indices();
    const auto& vals = block.values();
    for (int r = 0; r < block.rows(); ++r)
        for (int k = off[r]; k < off[r + 1]; ++k) {
            if (transposed) out.add(row_offset + cols[k], col_offset + r, scale * vals[k]);
            else out.add(row_offset + r, col_offset + cols[k], scale * vals[k]);
        }
}

void ConstrainedOperator::apply_to_rhs(std::vector<double>& rhs) const {
    std::vector<double> g(rhs.size(), 0.0);
    for (const auto& [dof, value] : constrained) g[dof] = value;
    lift.multiply_add(g, rhs, -1.0);
    for (const auto& [dof, value] : constrained) rhs[dof] = value;
}

ConstrainedOperator apply_constraints(int n, const TripletList& raw, const std::map<int, double>& constrained) {
    std::vector<char> fixed(n, 0);
    for (const auto& [dof, _] : constrained) {
        if (dof < 0 || dof >= n) throw ValidationError("constrained DOF out of range");
        fixed[dof] = 1;
    }
    TripletList kept, lifted;
    kept.reserve(raw.size());
    for (const auto& e : raw.entries()) {
        if (fixed[e.row]) continue;
        if (fixed[e.col]) lifted.add(e.row, e.col, e.value);
        else kept.add(e.row, e.col, e.value);
    }
    for (const auto& [dof, _] : constrained) kept.add(dof, dof, 1.0);
    return {CsrMatrix::from_triplets(n, n, kept), CsrMatrix::from_triplets(n, n, lifted), constrained};
}

}  // namespace fpsi
