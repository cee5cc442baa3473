#pragma once

#include "fpsi/assembly.hpp"
#include "fpsi/config.hpp"
#include "fpsi/fem.hpp"
#include "fpsi/linsolve.hpp"
#include "fpsi/mesh.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

namespace fpsi {

struct PlateStokesState {
    double t = 0.0;
    std::vector<double> u;      // P2, [x | y]
    std::vector<double> pi;     // P1
    std::vector<double> w;      // Hermite
    std::vector<double> v;      // Hermite
    std::vector<double> qjump;  // P1 on the interface
    std::vector<double> qbar;   // P1 on the interface
};

using TractionFn = std::function<Vec2(double x, double y, double t)>;

// Hooks for verification runs. Defaults reproduce the physical problem.
struct PlateStokesOptions {
    TractionFn inlet_traction;   // default: P_in(t) n on x = 0
    TractionFn outlet_traction;  // default: traction free
    bool freeze_plate = false;   // w = v = qbar = 0 and [q] = frozen_qjump(x) held strongly
    std::function<double(double x)> frozen_qjump;
};

// Operator blocks shared by assembly and the energy audit.
struct PlateStokesOperators {
    CsrMatrix fluid_mass;     // (u, phi)
    CsrMatrix fluid_strain;   // (2 D(u), D(phi))
    CsrMatrix fluid_div;      // (s, div u), pressure rows
    CsrMatrix slip;           // (u_x, phi_x) on the interface
    CsrMatrix normal_trace;   // ([s], u_y) on the interface, interface rows
    CsrMatrix plate_mass;     // (v, phi) Hermite
    CsrMatrix plate_bending;  // (v'', phi'')
    CsrMatrix jump_mass;      // P1 interface mass
    CsrMatrix jump_value;     // ([s], phi), interface rows, Hermite columns
    CsrMatrix jump_curv;      // ([s], phi''), interface rows, Hermite columns
    std::vector<double> inlet_normal;  // integral of phi . n over the inlet
    std::vector<double> gamma_ones;    // integral of [s] over the interface
};

class PlateStokesProblem {
public:
    PlateStokesProblem(PhysicalParams params, int nx, int ny, PlateStokesOptions options = {});
    explicit PlateStokesProblem(const SimConfig& cfg, PlateStokesOptions options = {});

    const PhysicalParams& params() const { return params_; }
    const Mesh2D& fluid_mesh() const { return fluid_mesh_; }
    const Mesh1D& gamma_mesh() const { return gamma_mesh_; }
    const DofMap& velocity_dofs() const { return vel_; }
    const DofMap& pressure_dofs() const { return pres_; }
    const DofMap& plate_dofs() const { return plate_; }
    const DofMap& jump_dofs() const { return jump_; }
    const DofLayout& layout() const { return layout_; }
    const PlateStokesOperators& operators() const { return ops_; }
    const std::map<int, double>& constraints() const { return constrained_; }

    PlateStokesState zero_state() const;
    // Clamped quartic bump 16 A s^2 (1 - s)^2, s = x / L, Hermite-interpolated into w.
    PlateStokesState bump_state(double amplitude) const;

    CsrMatrix step_matrix(double dt) const;  // constrained, depends on dt only
    std::vector<double> step_rhs(const PlateStokesState& prev, double dt, double t_next) const;
    LinearSystem assemble_step_system(const PlateStokesState& prev, double dt, double t_next) const;

    // Factorizations are cached per dt; subsequent calls with the same dt only back-substitute.
    PlateStokesState advance(const PlateStokesState& prev, double dt, double t_next) const;
    PlateStokesState unpack(std::span<const double> x, const PlateStokesState& prev, double dt, double t_next) const;

    // Cellwise u.n - v at interface cell midpoints.
    std::vector<double> filtration_velocity(const PlateStokesState& state) const;

    double inlet_traction_work(const PlateStokesState& state) const;  // boundary power at state.t

    std::vector<double> gamma_vertex_displacement(const PlateStokesState& s) const;
    std::vector<double> gamma_vertex_normal_velocity(const PlateStokesState& s) const;

private:
    void build();
    std::vector<double> traction_load(const TractionFn& fn, BoundaryTag tag, double t) const;

    PhysicalParams params_;
    PlateStokesOptions options_;
    Mesh2D fluid_mesh_;
    Mesh1D gamma_mesh_;
    DofMap vel_, pres_, plate_, jump_;
    DofLayout layout_;
    PlateStokesOperators ops_;
    std::map<int, double> constrained_;
    std::vector<int> top_vertices_;  // fluid vertices on the interface, ordered by x

    mutable std::mutex cache_mutex_;
    mutable double cached_dt_ = -1.0;
    mutable std::shared_ptr<const SparseLu> cached_lu_;
    mutable std::shared_ptr<const ConstrainedOperator> cached_op_;

    std::shared_ptr<const ConstrainedOperator> constrained_operator(double dt) const;
};

}  // namespace fpsi
