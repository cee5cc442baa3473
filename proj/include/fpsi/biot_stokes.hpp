#pragma once

#include "fpsi/assembly.hpp"
#include "fpsi/config.hpp"
#include "fpsi/fem.hpp"
#include "fpsi/linsolve.hpp"
#include "fpsi/mesh.hpp"

#include <memory>
#include <mutex>
#include <vector>

namespace fpsi {

struct BiotStokesState {
    double t = 0.0;
    std::vector<double> u;    // fluid P2, [x | y]
    std::vector<double> pi;   // fluid P1
    std::vector<double> eta;  // solid displacement P2, [x | y]
    std::vector<double> xi;   // solid velocity P2, [x | y]
    std::vector<double> q;    // pore pressure P1
};

struct NitscheSpec {
    double penalty = 10.0;
    double h = 1.0;
};

// Blocks in global layout coordinates (u, pi, xi, q) for the interface terms, local blocks otherwise.
struct BiotStokesOperators {
    CsrMatrix fluid_mass, fluid_strain, fluid_div;
    CsrMatrix solid_mass, solid_strain, solid_divdiv, solid_div;  // solid_div: (s, div zeta), pressure rows
    CsrMatrix pore_mass, pore_stiffness;
    CsrMatrix slip;             // ((u - xi)_x, (phi - zeta)_x) on the interface, global
    CsrMatrix exchange;         // skew normal-stress / mass-exchange coupling, global
    CsrMatrix penalty;          // (R, R') with R = (u - xi).n + kappa grad q.n, global
    std::vector<double> inlet_normal;
};

class BiotStokesProblem {
public:
    BiotStokesProblem(PhysicalParams params, int nx, int ny_f, int ny_p, NitscheSpec nitsche);
    explicit BiotStokesProblem(const SimConfig& cfg);

    const PhysicalParams& params() const { return params_; }
    const NitscheSpec& nitsche() const { return nitsche_; }
    const Mesh2D& fluid_mesh() const { return fluid_mesh_; }
    const Mesh2D& solid_mesh() const { return solid_mesh_; }
    const Mesh1D& gamma_mesh() const { return gamma_mesh_; }
    const DofMap& velocity_dofs() const { return vel_; }
    const DofMap& pressure_dofs() const { return pres_; }
    const DofMap& solid_dofs() const { return disp_; }
    const DofMap& pore_dofs() const { return pore_; }
    const DofLayout& layout() const { return layout_; }
    const BiotStokesOperators& operators() const { return ops_; }
    const std::map<int, double>& constraints() const { return constrained_; }

    BiotStokesState zero_state() const;
    // Layer translated vertically by the clamped quartic bump used for Problem I.
    BiotStokesState bump_state(double amplitude) const;

    CsrMatrix step_matrix(double dt) const;
    std::vector<double> step_rhs(const BiotStokesState& prev, double dt, double t_next) const;
    LinearSystem assemble_step_system_biot(const BiotStokesState& prev, double dt, double t_next) const;
    BiotStokesState advance_biot(const BiotStokesState& prev, double dt, double t_next) const;

    // Global vector (layout order) holding the unknowns that the interface forms act on.
    std::vector<double> pack(const BiotStokesState& s) const;

    // eta_y sampled on the mid-line y = H/2 at the interface vertices.
    std::vector<double> midsurface_displacement(const BiotStokesState& s) const;
    std::vector<double> interface_pore_pressure(const BiotStokesState& s) const;  // q on the lower face
    std::vector<double> gamma_vertex_normal_velocity(const BiotStokesState& s) const;
    double inlet_traction_work(const BiotStokesState& s) const;

private:
    void build();
    std::shared_ptr<const ConstrainedOperator> constrained_operator(double dt) const;

    PhysicalParams params_;
    NitscheSpec nitsche_;
    Mesh2D fluid_mesh_, solid_mesh_;
    Mesh1D gamma_mesh_;
    DofMap vel_, pres_, disp_, pore_;
    DofLayout layout_;
    BiotStokesOperators ops_;
    std::map<int, double> constrained_;
    std::vector<int> fluid_top_vertices_;

    mutable std::mutex cache_mutex_;
    mutable double cached_dt_ = -1.0;
    mutable std::shared_ptr<const SparseLu> cached_lu_;
    mutable std::shared_ptr<const ConstrainedOperator> cached_op_;
};

}  // namespace fpsi
