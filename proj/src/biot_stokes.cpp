#include "fpsi/biot_stokes.hpp"

#include "fpsi/error.hpp"

#include <cmath>
#include <utility>

namespace fpsi {

BiotStokesProblem::BiotStokesProblem(PhysicalParams params, int nx, int ny_f, int ny_p, NitscheSpec nitsche)
    : params_(std::move(params)), nitsche_(nitsche) {
    if (!(nitsche_.penalty > 0)) throw ValidationError("nitsche penalty must be positive");
    if (!(nitsche_.h > 0)) throw ValidationError("nitsche mesh size must be positive");
    const auto& g = params_.geometry;
    fluid_mesh_ = build_rect_mesh(nx, ny_f, {0.0, g.L, -g.R_f, 0.0}, MeshRole::Fluid);
    solid_mesh_ = build_rect_mesh(nx, ny_p, {0.0, g.L, 0.0, g.H}, MeshRole::Biot);
    gamma_mesh_ = build_interval_mesh(nx, g.L);
    build();
}

BiotStokesProblem::BiotStokesProblem(const SimConfig& cfg)
    : BiotStokesProblem(cfg.params, cfg.nx_f, cfg.ny_f, cfg.ny_p,
                        {cfg.effective_nitsche_penalty(), cfg.params.geometry.L / cfg.nx_f}) {}

void BiotStokesProblem::build() {
    vel_ = build_dof_map(fluid_mesh_, ElementKind::P2Tri);
    pres_ = build_dof_map(fluid_mesh_, ElementKind::P1Tri);
    disp_ = build_dof_map(solid_mesh_, ElementKind::P2Tri, {.tags = {BoundaryTag::StructLeft, BoundaryTag::StructRight}, .clamp_ends = false});
    pore_ = build_dof_map(solid_mesh_, ElementKind::P1Tri, {.tags = {BoundaryTag::InterfacePlus}, .clamp_ends = false});
    const int nu = vel_.n_dofs, np = pres_.n_dofs, nb = disp_.n_dofs, nq = pore_.n_dofs;
    layout_ = DofLayout{};
    layout_.add("u", 2 * nu).add("pi", np).add("xi", 2 * nb).add("q", nq);
    const int ou = layout_["u"].offset, ox = layout_["xi"].offset, oq = layout_["q"].offset;
    const int n = layout_.dimension();

    for (const auto& f : facets_with_tag(fluid_mesh_, BoundaryTag::Symmetry))
        for (int d : vel_.facet_dofs(f)) constrained_[ou + nu + d] = 0.0;
    for (const auto& [d, value] : disp_.constrained) {
        constrained_[ox + d] = value;
        constrained_[ox + nb + d] = value;
    }
    for (const auto& [d, _] : pore_.constrained) constrained_[oq + d] = params_.q_plus;

    ops_.fluid_mass = CsrMatrix::from_triplets(2 * nu, 2 * nu, vector_mass(fluid_mesh_, vel_));
    ops_.fluid_strain = CsrMatrix::from_triplets(2 * nu, 2 * nu, strain_form(fluid_mesh_, vel_));
    ops_.fluid_div = CsrMatrix::from_triplets(np, 2 * nu, divergence_form(fluid_mesh_, vel_, pres_));
    ops_.solid_mass = CsrMatrix::from_triplets(2 * nb, 2 * nb, vector_mass(solid_mesh_, disp_));
    ops_.solid_strain = CsrMatrix::from_triplets(2 * nb, 2 * nb, strain_form(solid_mesh_, disp_));
    ops_.solid_divdiv = CsrMatrix::from_triplets(2 * nb, 2 * nb, div_div_form(solid_mesh_, disp_));
    ops_.solid_div = CsrMatrix::from_triplets(nq, 2 * nb, divergence_form(solid_mesh_, disp_, pore_));
    ops_.pore_mass = CsrMatrix::from_triplets(nq, nq, scalar_mass(solid_mesh_, pore_));
    ops_.pore_stiffness = CsrMatrix::from_triplets(nq, nq, scalar_stiffness(solid_mesh_, pore_));
    ops_.inlet_normal = boundary_load(fluid_mesh_, vel_, BoundaryTag::Inlet, [](double, double) { return Vec2{-1.0, 0.0}; });

    const auto ftop = facets_with_tag(fluid_mesh_, BoundaryTag::InterfaceMinus);
    const auto sbot = facets_with_tag(solid_mesh_, BoundaryTag::InterfaceMinus);
    if (ftop.size() != sbot.size()) throw ValidationError("fluid and solid interface grids differ");
    const double kappa = params_.biot.kappa;
    const auto rule = quadrature_rule(CellShape::Interval, kDefaultIntervalOrder);
    TripletList slip, exchange, penalty;
    std::vector<std::pair<int, double>> rs, rp;
    for (std::size_t c = 0; c < ftop.size(); ++c) {
        const auto& ff = ftop[c];
        const auto& sf = sbot[c];
        const auto fa = fluid_mesh_.vertices[ff.edge[0]], fb = fluid_mesh_.vertices[ff.edge[1]];
        const auto sa = solid_mesh_.vertices[sf.edge[0]], sb = solid_mesh_.vertices[sf.edge[1]];
        const double x0 = std::min(fa.x, fb.x), x1 = std::max(fa.x, fb.x);
        if (std::min(sa.x, sb.x) != x0 || std::max(sa.x, sb.x) != x1) throw ValidationError("fluid and solid interface grids differ");
        const double h = x1 - x0;
        const TriangleMap fmap(fluid_mesh_, ff.cell), smap(solid_mesh_, sf.cell);
        const auto fd = vel_.cell(ff.cell);
        const auto sd = disp_.cell(sf.cell);
        const auto pd = pore_.cell(sf.cell);
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const double x = x0 + rule.points[q][0] * h;
            const double w = rule.weights[q] * h;
            const auto fbasis = reference_basis(ElementKind::P2Tri, fmap.to_reference({x, 0.0}));
            const auto sbasis = reference_basis(ElementKind::P2Tri, smap.to_reference({x, 0.0}));
            const auto pbasis = physical_basis(ElementKind::P1Tri, smap, smap.to_reference({x, 0.0}));
            rs.clear();
            rp.clear();
            for (int i = 0; i < 6; ++i) {
                rs.emplace_back(ou + fd[i], fbasis.values[i]);
                rs.emplace_back(ox + sd[i], -sbasis.values[i]);
                rp.emplace_back(ou + nu + fd[i], fbasis.values[i]);
                rp.emplace_back(ox + nb + sd[i], -sbasis.values[i]);
            }
            for (int k = 0; k < 3; ++k) rp.emplace_back(oq + pd[k], kappa * pbasis.gradients[k][1]);
            for (const auto& [ri, rv] : rs)
                for (const auto& [ci, cv] : rs) slip.add(ri, ci, w * rv * cv);
            for (const auto& [ri, rv] : rp)
                for (const auto& [ci, cv] : rp) penalty.add(ri, ci, w * rv * cv);
            // normal stress -q on the fluid, +q on the solid; mass exchange (u - xi).n into the pores
            for (int k = 0; k < 3; ++k) {
                const double pk = pbasis.values[k];
                for (int i = 0; i < 6; ++i) {
                    exchange.add(ou + nu + fd[i], oq + pd[k], w * fbasis.values[i] * pk);
                    exchange.add(oq + pd[k], ou + nu + fd[i], -w * fbasis.values[i] * pk);
                    exchange.add(ox + nb + sd[i], oq + pd[k], -w * sbasis.values[i] * pk);
                    exchange.add(oq + pd[k], ox + nb + sd[i], w * sbasis.values[i] * pk);
                }
            }
        }
    }
    ops_.slip = CsrMatrix::from_triplets(n, n, slip);
    ops_.exchange = CsrMatrix::from_triplets(n, n, exchange);
    ops_.penalty = CsrMatrix::from_triplets(n, n, penalty);

    for (const auto& f : ftop) fluid_top_vertices_.push_back(std::min(f.edge[0], f.edge[1]));
    fluid_top_vertices_.push_back(fluid_mesh_.vertex_index(fluid_mesh_.nx, fluid_mesh_.ny));
}

BiotStokesState BiotStokesProblem::zero_state() const {
    BiotStokesState s;
    s.u.assign(2 * vel_.n_dofs, 0.0);
    s.pi.assign(pres_.n_dofs, 0.0);
    s.eta.assign(2 * disp_.n_dofs, 0.0);
    s.xi.assign(2 * disp_.n_dofs, 0.0);
    s.q.assign(pore_.n_dofs, 0.0);
    for (const auto& [d, _] : pore_.constrained) s.q[d] = params_.q_plus;
    return s;
}

BiotStokesState BiotStokesProblem::bump_state(double amplitude) const {
    auto s = zero_state();
    const double L = params_.geometry.L;
    const int nb = disp_.n_dofs;
    for (int d = 0; d < nb; ++d) {
        const double r = disp_.coords[d].x / L;
        s.eta[nb + d] = disp_.is_constrained(d) ? 0.0 : 16.0 * amplitude * r * r * (1 - r) * (1 - r);
    }
    return s;
}

std::shared_ptr<const ConstrainedOperator> BiotStokesProblem::constrained_operator(double dt) const {
    {
        std::scoped_lock lock(cache_mutex_);
        if (cached_op_ && cached_dt_ == dt) return cached_op_;
    }
    if (!(dt > 0)) throw ValidationError("dt must be positive");
    const auto& f = params_.fluid;
    const auto& b = params_.biot;
    const int ou = layout_["u"].offset, op = layout_["pi"].offset, ox = layout_["xi"].offset, oq = layout_["q"].offset;

    TripletList t;
    add_block(t, ops_.fluid_mass, ou, ou, f.rho_f / dt);
    add_block(t, ops_.fluid_strain, ou, ou, f.mu_f);
    add_block(t, ops_.fluid_div, ou, op, -1.0, true);
    add_block(t, ops_.fluid_div, op, ou, -1.0);

    add_block(t, ops_.solid_mass, ox, ox, b.rho_b / dt + dt * b.gamma);
    add_block(t, ops_.solid_strain, ox, ox, dt * b.mu_b);
    add_block(t, ops_.solid_divdiv, ox, ox, dt * b.lambda_b);
    add_block(t, ops_.solid_div, ox, oq, -b.alpha, true);
    add_block(t, ops_.solid_div, oq, ox, b.alpha);
    add_block(t, ops_.pore_mass, oq, oq, b.c0 / dt);
    add_block(t, ops_.pore_stiffness, oq, oq, b.kappa);

    add_block(t, ops_.slip, 0, 0, f.beta);
    add_block(t, ops_.exchange, 0, 0);
    add_block(t, ops_.penalty, 0, 0, nitsche_.penalty / nitsche_.h);

    auto op_ptr = std::make_shared<const ConstrainedOperator>(apply_constraints(layout_.dimension(), t, constrained_));
    std::scoped_lock lock(cache_mutex_);
    if (cached_dt_ != dt) {
        cached_dt_ = dt;
        cached_lu_.reset();
    }
    cached_op_ = op_ptr;
    return op_ptr;
}

CsrMatrix BiotStokesProblem::step_matrix(double dt) const { return constrained_operator(dt)->matrix; }

std::vector<double> BiotStokesProblem::step_rhs(const BiotStokesState& prev, double dt, double t_next) const {
    const auto& f = params_.fluid;
    const auto& b = params_.biot;
    std::vector<double> r(layout_.dimension(), 0.0);
    auto ru = layout_.view(std::span<double>(r), "u");
    auto rx = layout_.view(std::span<double>(r), "xi");
    auto rq = layout_.view(std::span<double>(r), "q");
    ops_.fluid_mass.multiply_add(prev.u, ru, f.rho_f / dt);
    const double p_in = inlet_pressure(t_next, params_.pulse);
    for (std::size_t i = 0; i < ru.size(); ++i) ru[i] += p_in * ops_.inlet_normal[i];
    ops_.solid_mass.multiply_add(prev.xi, rx, b.rho_b / dt);
    ops_.solid_mass.multiply_add(prev.eta, rx, -b.gamma);
    ops_.solid_strain.multiply_add(prev.eta, rx, -b.mu_b);
    ops_.solid_divdiv.multiply_add(prev.eta, rx, -b.lambda_b);
    ops_.pore_mass.multiply_add(prev.q, rq, b.c0 / dt);
    constrained_operator(dt)->apply_to_rhs(r);
    return r;
}

LinearSystem BiotStokesProblem::assemble_step_system_biot(const BiotStokesState& prev, double dt, double t_next) const {
    if (prev.u.size() != static_cast<std::size_t>(layout_["u"].size) || prev.eta.size() != static_cast<std::size_t>(layout_["xi"].size))
        throw ValidationError("state does not match the problem's DOF maps");
    return {step_matrix(dt), step_rhs(prev, dt, t_next), layout_};
}

BiotStokesState BiotStokesProblem::advance_biot(const BiotStokesState& prev, double dt, double t_next) const {
    const auto rhs = step_rhs(prev, dt, t_next);
    std::shared_ptr<const SparseLu> lu;
    {
        std::scoped_lock lock(cache_mutex_);
        if (cached_dt_ == dt) lu = cached_lu_;
    }
    if (!lu) {
        lu = std::make_shared<const SparseLu>(constrained_operator(dt)->matrix);
        std::scoped_lock lock(cache_mutex_);
        if (cached_dt_ == dt) cached_lu_ = lu;
    }
    const auto x = lu->solve(rhs);
    BiotStokesState s;
    s.t = t_next;
    auto copy = [&](std::string_view name) {
        const auto v = layout_.view(std::span<const double>(x), name);
        return std::vector<double>(v.begin(), v.end());
    };
    s.u = copy("u");
    s.pi = copy("pi");
    s.xi = copy("xi");
    s.q = copy("q");
    s.eta.resize(prev.eta.size());
    for (std::size_t i = 0; i < s.eta.size(); ++i) s.eta[i] = prev.eta[i] + dt * s.xi[i];
    return s;
}

std::vector<double> BiotStokesProblem::pack(const BiotStokesState& s) const {
    std::vector<double> x(layout_.dimension(), 0.0);
    auto put = [&](std::string_view name, const std::vector<double>& v) {
        auto dst = layout_.view(std::span<double>(x), name);
        std::copy(v.begin(), v.end(), dst.begin());
    };
    put("u", s.u);
    put("pi", s.pi);
    put("xi", s.xi);
    put("q", s.q);
    return x;
}

std::vector<double> BiotStokesProblem::midsurface_displacement(const BiotStokesState& s) const {
    const int nb = disp_.n_dofs;
    const std::span<const double> ey(s.eta.data() + nb, nb);
    const double ymid = 0.5 * params_.geometry.H;
    std::vector<double> out;
    out.reserve(gamma_mesh_.vertices.size());
    for (double x : gamma_mesh_.vertices) out.push_back(eval_scalar(solid_mesh_, disp_, ey, {x, ymid}));
    return out;
}

std::vector<double> BiotStokesProblem::interface_pore_pressure(const BiotStokesState& s) const {
    std::vector<double> out(gamma_mesh_.vertices.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.q[solid_mesh_.vertex_index(static_cast<int>(i), 0)];
    return out;
}

std::vector<double> BiotStokesProblem::gamma_vertex_normal_velocity(const BiotStokesState& s) const {
    const int nu = vel_.n_dofs;
    std::vector<double> out;
    out.reserve(fluid_top_vertices_.size());
    for (int v : fluid_top_vertices_) out.push_back(s.u[nu + v]);
    return out;
}

double BiotStokesProblem::inlet_traction_work(const BiotStokesState& s) const {
    double p = 0;
    for (std::size_t i = 0; i < ops_.inlet_normal.size(); ++i) p += ops_.inlet_normal[i] * s.u[i];
    return inlet_pressure(s.t, params_.pulse) * p;
}

}  // namespace fpsi
