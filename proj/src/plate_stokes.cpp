#include "fpsi/plate_stokes.hpp"

#include "fpsi/error.hpp"

#include <cmath>

namespace fpsi {

PlateStokesProblem::PlateStokesProblem(PhysicalParams params, int nx, int ny, PlateStokesOptions options)
    : params_(std::move(params)), options_(std::move(options)) {
    const auto& g = params_.geometry;
    fluid_mesh_ = build_rect_mesh(nx, ny, {0.0, g.L, -g.R_f, 0.0}, MeshRole::Fluid);
    gamma_mesh_ = build_interval_mesh(nx, g.L);
    build();
}

PlateStokesProblem::PlateStokesProblem(const SimConfig& cfg, PlateStokesOptions options)
    : PlateStokesProblem(cfg.params, cfg.nx_f, cfg.ny_f, std::move(options)) {}

void PlateStokesProblem::build() {
    vel_ = build_dof_map(fluid_mesh_, ElementKind::P2Tri);
    pres_ = build_dof_map(fluid_mesh_, ElementKind::P1Tri);
    plate_ = build_dof_map(gamma_mesh_, ElementKind::HermiteInt, {.tags = {}, .clamp_ends = true});
    jump_ = build_dof_map(gamma_mesh_, ElementKind::P1Int);
    const int nu = vel_.n_dofs, np = pres_.n_dofs, nh = plate_.n_dofs, ni = jump_.n_dofs;
    layout_ = DofLayout{};
    layout_.add("u", 2 * nu).add("pi", np).add("v", nh).add("qjump", ni).add("qbar", ni);

    const int ou = layout_["u"].offset, ov = layout_["v"].offset;
    const int oj = layout_["qjump"].offset, ob = layout_["qbar"].offset;
    for (const auto& f : facets_with_tag(fluid_mesh_, BoundaryTag::Symmetry))
        for (int d : vel_.facet_dofs(f)) constrained_[ou + nu + d] = 0.0;
    if (options_.freeze_plate) {
        for (int d = 0; d < nh; ++d) constrained_[ov + d] = 0.0;
        for (int d = 0; d < ni; ++d) {
            constrained_[ob + d] = 0.0;
            constrained_[oj + d] = options_.frozen_qjump ? options_.frozen_qjump(gamma_mesh_.vertices[d]) : 0.0;
        }
    } else {
        for (const auto& [d, value] : plate_.constrained) constrained_[ov + d] = value;
    }

    ops_.fluid_mass = CsrMatrix::from_triplets(2 * nu, 2 * nu, vector_mass(fluid_mesh_, vel_));
    ops_.fluid_strain = CsrMatrix::from_triplets(2 * nu, 2 * nu, strain_form(fluid_mesh_, vel_));
    ops_.fluid_div = CsrMatrix::from_triplets(np, 2 * nu, divergence_form(fluid_mesh_, vel_, pres_));
    ops_.inlet_normal = boundary_load(fluid_mesh_, vel_, BoundaryTag::Inlet, [](double, double) { return Vec2{-1.0, 0.0}; });

    // Interface terms pair the fluid top facet c with interface cell c.
    const auto top = facets_with_tag(fluid_mesh_, BoundaryTag::InterfaceMinus);
    if (top.size() != gamma_mesh_.cells.size()) throw ValidationError("fluid interface and plate mesh do not match");
    const auto rule = quadrature_rule(CellShape::Interval, kDefaultIntervalOrder);
    TripletList slip, trace, pmass, pbend, jmass, jval, jcurv;
    ops_.gamma_ones.assign(ni, 0.0);
    for (std::size_t c = 0; c < top.size(); ++c) {
        const auto& f = top[c];
        const auto pa = fluid_mesh_.vertices[f.edge[0]], pb = fluid_mesh_.vertices[f.edge[1]];
        const double x0 = gamma_mesh_.vertices[gamma_mesh_.cells[c][0]], x1 = gamma_mesh_.vertices[gamma_mesh_.cells[c][1]];
        if (std::min(pa.x, pb.x) != x0 || std::max(pa.x, pb.x) != x1) throw ValidationError("interface x-grids differ");
        const double h = x1 - x0;
        const TriangleMap map(fluid_mesh_, f.cell);
        const auto fd = vel_.cell(f.cell);
        const auto hd = plate_.cell(static_cast<int>(c));
        const auto jd = jump_.cell(static_cast<int>(c));
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const double s = rule.points[q][0];
            const double w = rule.weights[q] * h;
            const auto fb = reference_basis(ElementKind::P2Tri, map.to_reference({x0 + s * h, 0.0}));
            const auto he = hermite_physical(s, h);
            const double p[2] = {1 - s, s};
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) slip.add(fd[i], fd[j], w * fb.values[i] * fb.values[j]);
            for (int k = 0; k < 2; ++k) {
                ops_.gamma_ones[jd[k]] += w * p[k];
                for (int j = 0; j < 6; ++j) trace.add(jd[k], nu + fd[j], w * p[k] * fb.values[j]);
                for (int m = 0; m < 2; ++m) jmass.add(jd[k], jd[m], w * p[k] * p[m]);
                for (int m = 0; m < 4; ++m) {
                    jval.add(jd[k], hd[m], w * p[k] * he.values[m]);
                    jcurv.add(jd[k], hd[m], w * p[k] * he.d2[m]);
                }
            }
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    pmass.add(hd[i], hd[j], w * he.values[i] * he.values[j]);
                    pbend.add(hd[i], hd[j], w * he.d2[i] * he.d2[j]);
                }
        }
    }
    ops_.slip = CsrMatrix::from_triplets(2 * nu, 2 * nu, slip);
    ops_.normal_trace = CsrMatrix::from_triplets(ni, 2 * nu, trace);
    ops_.plate_mass = CsrMatrix::from_triplets(nh, nh, pmass);
    ops_.plate_bending = CsrMatrix::from_triplets(nh, nh, pbend);
    ops_.jump_mass = CsrMatrix::from_triplets(ni, ni, jmass);
    ops_.jump_value = CsrMatrix::from_triplets(ni, nh, jval);
    ops_.jump_curv = CsrMatrix::from_triplets(ni, nh, jcurv);

    for (const auto& f : top) top_vertices_.push_back(f.edge[0] < f.edge[1] ? f.edge[0] : f.edge[1]);
    top_vertices_.push_back(fluid_mesh_.vertex_index(fluid_mesh_.nx, fluid_mesh_.ny));
}

PlateStokesState PlateStokesProblem::zero_state() const {
    PlateStokesState s;
    s.u.assign(2 * vel_.n_dofs, 0.0);
    s.pi.assign(pres_.n_dofs, 0.0);
    s.w.assign(plate_.n_dofs, 0.0);
    s.v.assign(plate_.n_dofs, 0.0);
    s.qjump.assign(jump_.n_dofs, 0.0);
    s.qbar.assign(jump_.n_dofs, 0.0);
    if (options_.freeze_plate) {
        const int oj = layout_["qjump"].offset;
        for (int d = 0; d < jump_.n_dofs; ++d) s.qjump[d] = constrained_.at(oj + d);
    }
    return s;
}

PlateStokesState PlateStokesProblem::bump_state(double amplitude) const {
    auto s = zero_state();
    const double L = params_.geometry.L;
    for (std::size_t i = 0; i < gamma_mesh_.vertices.size(); ++i) {
        const double r = gamma_mesh_.vertices[i] / L;
        s.w[2 * i] = 16.0 * amplitude * r * r * (1 - r) * (1 - r);
        s.w[2 * i + 1] = 16.0 * amplitude * (2 * r * (1 - r) * (1 - 2 * r)) / L;
    }
    for (const auto& [d, _] : plate_.constrained) s.w[d] = 0.0;
    return s;
}

CsrMatrix PlateStokesProblem::step_matrix(double dt) const { return constrained_operator(dt)->matrix; }

std::shared_ptr<const ConstrainedOperator> PlateStokesProblem::constrained_operator(double dt) const {
    {
        std::scoped_lock lock(cache_mutex_);
        if (cached_op_ && cached_dt_ == dt) return cached_op_;
    }
    if (!(dt > 0)) throw ValidationError("dt must be positive");
    const auto& f = params_.fluid;
    const auto pc = params_.plate();
    const double H = params_.geometry.H;
    const int ou = layout_["u"].offset, op = layout_["pi"].offset, ov = layout_["v"].offset;
    const int oj = layout_["qjump"].offset, ob = layout_["qbar"].offset;

    TripletList t;
    add_block(t, ops_.fluid_mass, ou, ou, f.rho_f / dt);
    add_block(t, ops_.fluid_strain, ou, ou, f.mu_f);
    add_block(t, ops_.slip, ou, ou, f.beta);
    add_block(t, ops_.fluid_div, ou, op, -1.0, true);
    add_block(t, ops_.normal_trace, ou, oj, -1.0, true);
    add_block(t, ops_.fluid_div, op, ou, -1.0);

    add_block(t, ops_.plate_mass, ov, ov, H * pc.rho_p / dt + dt * H * pc.gamma_p);
    add_block(t, ops_.plate_bending, ov, ov, dt * H * H * H * pc.D);
    const double curv = H * H * pc.alpha_p / 12.0;
    add_block(t, ops_.jump_value, ov, oj, 1.0, true);
    add_block(t, ops_.jump_curv, ov, oj, curv, true);

    add_block(t, ops_.jump_value, oj, ov, -1.0);
    add_block(t, ops_.jump_curv, oj, ov, -curv);
    add_block(t, ops_.jump_mass, oj, oj, H * pc.c0_p / (12.0 * dt) + 4.0 * pc.kappa_p / H);
    add_block(t, ops_.jump_mass, oj, ob, 6.0 * pc.kappa_p / H);
    add_block(t, ops_.normal_trace, oj, ou);

    add_block(t, ops_.jump_mass, ob, oj, 6.0 * pc.kappa_p / H);
    add_block(t, ops_.jump_mass, ob, ob, H * pc.c0_p / dt + 12.0 * pc.kappa_p / H);

    auto op_ptr = std::make_shared<const ConstrainedOperator>(apply_constraints(layout_.dimension(), t, constrained_));
    std::scoped_lock lock(cache_mutex_);
    if (cached_dt_ != dt) {
        cached_dt_ = dt;
        cached_lu_.reset();
    }
    cached_op_ = op_ptr;
    return op_ptr;
}

std::vector<double> PlateStokesProblem::traction_load(const TractionFn& fn, BoundaryTag tag, double t) const {
    return boundary_load(fluid_mesh_, vel_, tag, [&](double x, double y) { return fn(x, y, t); });
}

std::vector<double> PlateStokesProblem::step_rhs(const PlateStokesState& prev, double dt, double t_next) const {
    const auto& f = params_.fluid;
    const auto pc = params_.plate();
    const double H = params_.geometry.H;
    const double qp = params_.q_plus;
    std::vector<double> b(layout_.dimension(), 0.0);
    auto bu = layout_.view(std::span<double>(b), "u");
    auto bv = layout_.view(std::span<double>(b), "v");
    auto bj = layout_.view(std::span<double>(b), "qjump");
    auto bb = layout_.view(std::span<double>(b), "qbar");

    ops_.fluid_mass.multiply_add(prev.u, bu, f.rho_f / dt);
    if (options_.inlet_traction) {
        const auto load = traction_load(options_.inlet_traction, BoundaryTag::Inlet, t_next);
        for (std::size_t i = 0; i < bu.size(); ++i) bu[i] += load[i];
    } else {
        const double p_in = inlet_pressure(t_next, params_.pulse);
        for (std::size_t i = 0; i < bu.size(); ++i) bu[i] += p_in * ops_.inlet_normal[i];
    }
    if (options_.outlet_traction) {
        const auto load = traction_load(options_.outlet_traction, BoundaryTag::Outlet, t_next);
        for (std::size_t i = 0; i < bu.size(); ++i) bu[i] += load[i];
    }
    if (qp != 0.0) {
        const std::vector<double> ones(jump_.n_dofs, 1.0);
        const auto tr = ops_.normal_trace.transpose();
        tr.multiply_add(ones, bu, -qp);
    }

    ops_.plate_mass.multiply_add(prev.v, bv, H * pc.rho_p / dt);
    ops_.plate_bending.multiply_add(prev.w, bv, -H * H * H * pc.D);
    ops_.plate_mass.multiply_add(prev.w, bv, -H * pc.gamma_p);

    ops_.jump_mass.multiply_add(prev.qjump, bj, H * pc.c0_p / (12.0 * dt));
    ops_.jump_mass.multiply_add(prev.qbar, bb, H * pc.c0_p / dt);
    for (int i = 0; i < jump_.n_dofs; ++i) {
        bj[i] += 6.0 * pc.kappa_p / H * qp * ops_.gamma_ones[i];
        bb[i] += 12.0 * pc.kappa_p / H * qp * ops_.gamma_ones[i];
    }

    constrained_operator(dt)->apply_to_rhs(b);
    return b;
}

LinearSystem PlateStokesProblem::assemble_step_system(const PlateStokesState& prev, double dt, double t_next) const {
    if (prev.u.size() != static_cast<std::size_t>(layout_["u"].size) || prev.w.size() != static_cast<std::size_t>(plate_.n_dofs))
        throw ValidationError("state does not match the problem's DOF maps");
    return {step_matrix(dt), step_rhs(prev, dt, t_next), layout_};
}

PlateStokesState PlateStokesProblem::unpack(std::span<const double> x, const PlateStokesState& prev, double dt, double t_next) const {
    PlateStokesState s;
    s.t = t_next;
    auto copy = [&](std::string_view name) {
        const auto v = layout_.view(x, name);
        return std::vector<double>(v.begin(), v.end());
    };
    s.u = copy("u");
    s.pi = copy("pi");
    s.v = copy("v");
    s.qjump = copy("qjump");
    s.qbar = copy("qbar");
    s.w.resize(prev.w.size());
    for (std::size_t i = 0; i < s.w.size(); ++i) s.w[i] = prev.w[i] + dt * s.v[i];
    return s;
}

PlateStokesState PlateStokesProblem::advance(const PlateStokesState& prev, double dt, double t_next) const {
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
    return unpack(lu->solve(rhs), prev, dt, t_next);
}

std::vector<double> PlateStokesProblem::filtration_velocity(const PlateStokesState& s) const {
    const int nu = vel_.n_dofs;
    const std::span<const double> uy(s.u.data() + nu, nu);
    std::vector<double> out(gamma_mesh_.cells.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double xm = 0.5 * (gamma_mesh_.vertices[gamma_mesh_.cells[c][0]] + gamma_mesh_.vertices[gamma_mesh_.cells[c][1]]);
        out[c] = eval_scalar(fluid_mesh_, vel_, uy, {xm, 0.0}) - eval_hermite(gamma_mesh_, s.v, xm);
    }
    return out;
}

double PlateStokesProblem::inlet_traction_work(const PlateStokesState& s) const {
    if (options_.inlet_traction) {
        const auto load = traction_load(options_.inlet_traction, BoundaryTag::Inlet, s.t);
        double p = 0;
        for (std::size_t i = 0; i < load.size(); ++i) p += load[i] * s.u[i];
        return p;
    }
    double p = 0;
    for (std::size_t i = 0; i < ops_.inlet_normal.size(); ++i) p += ops_.inlet_normal[i] * s.u[i];
    return inlet_pressure(s.t, params_.pulse) * p;
}

std::vector<double> PlateStokesProblem::gamma_vertex_displacement(const PlateStokesState& s) const {
    std::vector<double> out(gamma_mesh_.vertices.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.w[2 * i];
    return out;
}

std::vector<double> PlateStokesProblem::gamma_vertex_normal_velocity(const PlateStokesState& s) const {
    const int nu = vel_.n_dofs;
    std::vector<double> out;
    out.reserve(top_vertices_.size());
    for (int v : top_vertices_) out.push_back(s.u[nu + v]);
    return out;
}

}  // namespace fpsi
