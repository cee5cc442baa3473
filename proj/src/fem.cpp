#include "fpsi/fem.hpp"

#include "fpsi/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <thread>

namespace fpsi {

int arity(ElementKind kind) {
    switch (kind) {
        case ElementKind::P1Tri: return 3;
        case ElementKind::P2Tri: return 6;
        case ElementKind::P1Int: return 2;
        case ElementKind::HermiteInt: return 4;
        case ElementKind::DG0Int: return 1;
    }
    return 0;
}

bool is_interval_kind(ElementKind kind) {
    return kind == ElementKind::P1Int || kind == ElementKind::HermiteInt || kind == ElementKind::DG0Int;
}

BasisEval reference_basis(ElementKind kind, std::array<double, 2> p) {
    constexpr double tol = 1e-12;
    BasisEval e;
    const double x = p[0], y = p[1];
    if (is_interval_kind(kind)) {
        if (x < -tol || x > 1 + tol) throw DomainError("point outside reference interval");
    } else if (x < -tol || y < -tol || x + y > 1 + tol) {
        throw DomainError("point outside reference triangle");
    }

    switch (kind) {
        case ElementKind::P1Tri:
            e.values = {1 - x - y, x, y};
            e.gradients = {{{-1, -1}}, {{1, 0}}, {{0, 1}}};
            break;
        case ElementKind::P2Tri: {
            const double l0 = 1 - x - y, l1 = x, l2 = y;
            e.values = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0};
            const double d0 = 4 * l0 - 1;
            e.gradients = {{{-d0, -d0}},
                           {{4 * l1 - 1, 0}},
                           {{0, 4 * l2 - 1}},
                           {{4 * (l0 - l1), -4 * l1}},
                           {{4 * l2, 4 * l1}},
                           {{-4 * l2, 4 * (l0 - l2)}}};
            break;
        }
        case ElementKind::P1Int:
            e.values = {1 - x, x};
            e.gradients = {{{-1, 0}}, {{1, 0}}};
            break;
        case ElementKind::HermiteInt: {
            const double x2 = x * x, x3 = x2 * x;
            e.values = {1 - 3 * x2 + 2 * x3, x - 2 * x2 + x3, 3 * x2 - 2 * x3, -x2 + x3};
            e.gradients = {{{-6 * x + 6 * x2, 0}}, {{1 - 4 * x + 3 * x2, 0}}, {{6 * x - 6 * x2, 0}}, {{-2 * x + 3 * x2, 0}}};
            e.second_derivatives = {-6 + 12 * x, -4 + 6 * x, 6 - 12 * x, -2 + 6 * x};
            break;
        }
        case ElementKind::DG0Int:
            e.values = {1};
            e.gradients = {{{0, 0}}};
            break;
    }
    return e;
}

namespace {

// Legendre polynomial P_n and its derivative at t.
std::pair<double, double> legendre(int n, double t) {
    double p0 = 1, p1 = t;
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    if (n == 0) return {1.0, 0.0};
    return {p1, n * (t * p1 - p0) / (t * t - 1)};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw ValidationError("Gauss rule needs at least one point");
    QuadratureRule r;
    r.order = 2 * n - 1;
    // roots come out in decreasing t, i.e. increasing s = (1 - t) / 2
    for (int i = 0; i < n; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(n, t);
            const double step = p / dp;
            t -= step;
            if (std::abs(step) < 1e-16) break;
        }
        const double dp = legendre(n, t).second;
        r.points.push_back({0.5 * (1 - t), 0});
        r.weights.push_back(1.0 / ((1 - t * t) * dp * dp));
    }
    return r;
}

QuadratureRule quadrature_rule(CellShape cell, int order) {
    if (order < 1 || order > 6) throw ValidationError("unsupported quadrature order " + std::to_string(order));
    if (cell == CellShape::Interval) {
        auto r = gauss_legendre((order + 2) / 2);
        r.order = order;
        return r;
    }
    QuadratureRule r;
    r.order = order;
    if (order == 1) {
        r.points = {{1.0 / 3, 1.0 / 3}};
        r.weights = {0.5};
        return r;
    }
    if (order == 2) {
        r.points = {{1.0 / 6, 1.0 / 6}, {2.0 / 3, 1.0 / 6}, {1.0 / 6, 2.0 / 3}};
        r.weights = {1.0 / 6, 1.0 / 6, 1.0 / 6};
        return r;
    }
    // Collapsed square: x = s, y = t (1 - s) with Jacobian (1 - s); one extra degree in s.
    const auto g = gauss_legendre((order + 3) / 2);
    for (std::size_t i = 0; i < g.points.size(); ++i) {
        for (std::size_t j = 0; j < g.points.size(); ++j) {
            const double s = g.points[i][0], t = g.points[j][0];
            r.points.push_back({s, t * (1 - s)});
            r.weights.push_back(g.weights[i] * g.weights[j] * (1 - s));
        }
    }
    return r;
}

std::vector<int> DofMap::facet_dofs(const BoundaryFacet& facet) const {
    std::vector<int> out{facet.edge[0], facet.edge[1]};
    if (kind == ElementKind::P2Tri) {
        out.push_back(edge_dof.at(std::minmax(facet.edge[0], facet.edge[1])));
    } else if (kind != ElementKind::P1Tri) {
        throw ValidationError("facet_dofs requires a triangle element map");
    }
    return out;
}

DofMap build_dof_map(const Mesh2D& mesh, ElementKind kind, const ConstraintSpec& constraints) {
    if (kind != ElementKind::P1Tri && kind != ElementKind::P2Tri) throw ValidationError("element kind incompatible with a 2D mesh");
    DofMap d;
    d.kind = kind;
    d.n_cells = static_cast<int>(mesh.triangles.size());
    const int nv = static_cast<int>(mesh.vertices.size());
    d.coords = mesh.vertices;
    if (kind == ElementKind::P1Tri) {
        for (const auto& t : mesh.triangles) d.cell_dofs.insert(d.cell_dofs.end(), t.begin(), t.end());
        d.n_dofs = nv;
    } else {
        int next = nv;
        for (const auto& t : mesh.triangles) {
            d.cell_dofs.insert(d.cell_dofs.end(), t.begin(), t.end());
            constexpr int local[3][2] = {{0, 1}, {1, 2}, {2, 0}};
            for (const auto& le : local) {
                const auto key = std::minmax(t[le[0]], t[le[1]]);
                auto [it, inserted] = d.edge_dof.try_emplace(key, next);
                if (inserted) {
                    const auto a = mesh.vertices[key.first], b = mesh.vertices[key.second];
                    d.coords.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
                    ++next;
                }
                d.cell_dofs.push_back(it->second);
            }
        }
        d.n_dofs = next;
    }
    for (BoundaryTag tag : constraints.tags) {
        for (const auto& f : facets_with_tag(mesh, tag))
            for (int dof : d.facet_dofs(f)) d.constrained[dof] = 0.0;
    }
    return d;
}

DofMap build_dof_map(const Mesh1D& mesh, ElementKind kind, const ConstraintSpec& constraints) {
    if (!is_interval_kind(kind)) throw ValidationError("element kind incompatible with an interval mesh");
    if (!constraints.tags.empty()) throw ValidationError("interval meshes carry no boundary tags");
    DofMap d;
    d.kind = kind;
    d.n_cells = static_cast<int>(mesh.cells.size());
    const int nv = static_cast<int>(mesh.vertices.size());
    switch (kind) {
        case ElementKind::P1Int:
            d.n_dofs = nv;
            for (const auto& c : mesh.cells) d.cell_dofs.insert(d.cell_dofs.end(), c.begin(), c.end());
            for (double x : mesh.vertices) d.coords.push_back({x, 0});
            if (constraints.clamp_ends) d.constrained = {{0, 0.0}, {nv - 1, 0.0}};
            break;
        case ElementKind::HermiteInt:
            // DOF 2i is the value at vertex i, 2i+1 the slope
            d.n_dofs = 2 * nv;
            for (const auto& c : mesh.cells)
                d.cell_dofs.insert(d.cell_dofs.end(), {2 * c[0], 2 * c[0] + 1, 2 * c[1], 2 * c[1] + 1});
            for (double x : mesh.vertices) d.coords.insert(d.coords.end(), {{x, 0}, {x, 0}});
            if (constraints.clamp_ends) d.constrained = {{0, 0.0}, {1, 0.0}, {2 * nv - 2, 0.0}, {2 * nv - 1, 0.0}};
            break;
        case ElementKind::DG0Int:
            d.n_dofs = d.n_cells;
            for (int c = 0; c < d.n_cells; ++c) {
                d.cell_dofs.push_back(c);
                d.coords.push_back({0.5 * (mesh.vertices[mesh.cells[c][0]] + mesh.vertices[mesh.cells[c][1]]), 0});
            }
            break;
        default: break;
    }
    return d;
}

CsrMatrix::CsrMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, const TripletList& triplets) {
    const auto& t = triplets.entries();
    std::vector<int> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    for (const auto& e : t)
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) throw ValidationError("triplet index out of range");
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return t[a].row != t[b].row ? t[a].row < t[b].row : t[a].col < t[b].col;
    });
    CsrMatrix m(rows, cols);
    m.col_indices_.reserve(t.size());
    m.values_.reserve(t.size());
    int last_row = -1, last_col = -1;
    for (int k : order) {
        const auto& e = t[k];
        if (e.row == last_row && e.col == last_col) {
            m.values_.back() += e.value;
            continue;
        }
        m.col_indices_.push_back(e.col);
        m.values_.push_back(e.value);
        ++m.row_offsets_[e.row + 1];
        last_row = e.row;
        last_col = e.col;
    }
    std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());
    return m;
}

CsrMatrix CsrMatrix::identity(int n) {
    TripletList t;
    for (int i = 0; i < n; ++i) t.add(i, i, 1.0);
    return from_triplets(n, n, t);
}

double CsrMatrix::at(int row, int col) const {
    const auto begin = col_indices_.begin() + row_offsets_[row];
    const auto end = col_indices_.begin() + row_offsets_[row + 1];
    const auto it = std::lower_bound(begin, end, col);
    return (it != end && *it == col) ? values_[it - col_indices_.begin()] : 0.0;
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(rows_, 0.0);
    multiply_add(x, y);
    return y;
}

void CsrMatrix::multiply_add(std::span<const double> x, std::span<double> y, double scale) const {
    for (int r = 0; r < rows_; ++r) {
        double s = 0;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) s += values_[k] * x[col_indices_[k]];
        y[r] += scale * s;
    }
}

CsrMatrix CsrMatrix::transpose() const {
    TripletList t;
    t.reserve(values_.size());
    for (int r = 0; r < rows_; ++r)
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) t.add(col_indices_[k], r, values_[k]);
    return from_triplets(cols_, rows_, t);
}

double CsrMatrix::bilinear_form(std::span<const double> x, std::span<const double> y) const {
    double s = 0;
    for (int r = 0; r < rows_; ++r) {
        double row = 0;
        for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) row += values_[k] * y[col_indices_[k]];
        s += x[r] * row;
    }
    return s;
}

double CsrMatrix::quadratic_form(std::span<const double> x) const { return bilinear_form(x, x); }

int assembly_threads() {
    if (const char* env = std::getenv("FPSI_NUM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    return 1;
}

TripletList assemble_cells(int n_cells, const std::function<void(int, TripletList&)>& body) {
    const int threads = std::max(1, std::min(assembly_threads(), n_cells));
    std::vector<TripletList> parts(threads);
    auto run = [&](int part) {
        const int begin = static_cast<int>(static_cast<long>(n_cells) * part / threads);
        const int end = static_cast<int>(static_cast<long>(n_cells) * (part + 1) / threads);
        for (int c = begin; c < end; ++c) body(c, parts[part]);
    };
    if (threads == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (int p = 0; p < threads; ++p) pool.emplace_back(run, p);
    }
    TripletList out;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    out.reserve(total);
    for (const auto& p : parts) out.append(p);
    return out;
}

}  // namespace fpsi
