#include "fpsi/driver.hpp"

#include "fpsi/diagnostics.hpp"
#include "fpsi/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace fpsi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

long step_index(double t, double dt) { return std::lround(t / dt); }

template <class Problem, class State, class Advance>
State integrate_impl(const Problem& problem, State s, double dt, int steps, Advance advance) {
    if (!(dt > 0)) throw ValidationError("dt must be positive");
    const long n0 = step_index(s.t, dt);
    for (int k = 1; k <= steps; ++k) s = advance(problem, s, dt, static_cast<double>(n0 + k) * dt);
    return s;
}

struct PlateAdapter {
    const PlateStokesProblem& p;
    PlateStokesState initial(double bump) const { return bump != 0 ? p.bump_state(bump) : p.zero_state(); }
    PlateStokesState advance(const PlateStokesState& s, double dt, double t) const { return p.advance(s, dt, t); }
    std::vector<double> displacement(const PlateStokesState& s) const { return p.gamma_vertex_displacement(s); }
    std::vector<double> jump(const PlateStokesState& s) const { return s.qjump; }
    std::vector<double> normal_velocity(const PlateStokesState& s) const { return p.gamma_vertex_normal_velocity(s); }
    EnergyBudget energy(const PlateStokesState& s) const { return energy_budget(p, s); }
    const Mesh2D& fluid_mesh() const { return p.fluid_mesh(); }
    const Mesh1D& gamma_mesh() const { return p.gamma_mesh(); }
    int nu() const { return p.velocity_dofs().n_dofs; }
};

struct BiotAdapter {
    const BiotStokesProblem& p;
    BiotStokesState initial(double bump) const { return bump != 0 ? p.bump_state(bump) : p.zero_state(); }
    BiotStokesState advance(const BiotStokesState& s, double dt, double t) const { return p.advance_biot(s, dt, t); }
    std::vector<double> displacement(const BiotStokesState& s) const { return p.midsurface_displacement(s); }
    std::vector<double> jump(const BiotStokesState& s) const {
        auto q = p.interface_pore_pressure(s);
        for (double& v : q) v = p.params().q_plus - v;
        return q;
    }
    std::vector<double> normal_velocity(const BiotStokesState& s) const { return p.gamma_vertex_normal_velocity(s); }
    EnergyBudget energy(const BiotStokesState& s) const { return energy_budget(p, s); }
    const Mesh2D& fluid_mesh() const { return p.fluid_mesh(); }
    const Mesh1D& gamma_mesh() const { return p.gamma_mesh(); }
    int nu() const { return p.velocity_dofs().n_dofs; }
};

template <class Adapter>
SimulationRecord run_with(const SimConfig& cfg, const Adapter& a, const RunHooks& hooks, Clock::time_point t0) {
    SimulationRecord rec;
    rec.config = cfg;
    rec.gamma_x = a.gamma_mesh().vertices;
    rec.fluid_mesh = a.fluid_mesh();
    rec.wall.setup_seconds = seconds_since(t0);

    const auto& fm = a.fluid_mesh();
    std::vector<int> top;
    for (int i = 0; i <= fm.nx; ++i) top.push_back(fm.vertex_index(i, fm.ny));
    const int nverts = static_cast<int>(fm.vertices.size());
    const int nu = a.nu();

    const auto wanted = snapshot_steps(cfg);
    auto next_snapshot = wanted.begin();

    auto observe = [&](int n, const auto& s) {
        auto w = a.displacement(s);
        auto q = a.jump(s);
        std::vector<double> pg;
        pg.reserve(top.size());
        for (int v : top) pg.push_back(s.pi[v]);
        for (double x : w) rec.max_abs_displacement = std::max(rec.max_abs_displacement, std::abs(x));
        rec.step_times.push_back(s.t);
        rec.energy.push_back(a.energy(s));
        if (next_snapshot != wanted.end() && *next_snapshot == n) {
            ++next_snapshot;
            Snapshot snap;
            snap.step = n;
            snap.t = s.t;
            snap.displacement = w;
            snap.pressure_jump = q;
            snap.normal_velocity = a.normal_velocity(s);
            snap.fluid_pressure.assign(s.pi.begin(), s.pi.begin() + nverts);
            snap.fluid_velocity.resize(2 * nverts);
            for (int v = 0; v < nverts; ++v) {
                snap.fluid_velocity[v] = s.u[v];
                snap.fluid_velocity[nverts + v] = s.u[nu + v];
            }
            rec.times.push_back(s.t);
            rec.snapshots.push_back(std::move(snap));
        }
        rec.displacement_history.push_back(std::move(w));
        rec.jump_history.push_back(std::move(q));
        rec.pressure_history.push_back(std::move(pg));
    };

    const int steps = cfg.step_count();
    auto s = a.initial(cfg.initial_bump);
    observe(0, s);
    const auto t1 = Clock::now();
    for (int n = 1; n <= steps; ++n) {
        try {
            s = a.advance(s, cfg.dt, n * cfg.dt);
        } catch (const SolverError& e) {
            throw SolverError("step " + std::to_string(n) + ": linear solve failed", e.residual());
        }
        observe(n, s);
        if (hooks.progress) hooks.progress(n, s.t);
    }
    rec.wall.step_seconds = seconds_since(t1);
    rec.wall.total_seconds = seconds_since(t0);
    return rec;
}

}  // namespace

std::vector<int> snapshot_steps(const SimConfig& cfg) {
    const int steps = cfg.step_count();
    std::set<int> out{0};
    if (cfg.cadence > 0)
        for (int n = cfg.cadence; n <= steps; n += cfg.cadence) out.insert(n);
    for (double t : cfg.effective_snapshot_times()) {
        const long n = step_index(t, cfg.dt);
        if (t >= 0 && n <= steps) out.insert(static_cast<int>(n));
    }
    return {out.begin(), out.end()};
}

PlateStokesState integrate(const PlateStokesProblem& problem, PlateStokesState start, double dt, int steps) {
    return integrate_impl(problem, std::move(start), dt, steps,
                          [](const PlateStokesProblem& p, const PlateStokesState& s, double h, double t) { return p.advance(s, h, t); });
}

BiotStokesState integrate(const BiotStokesProblem& problem, BiotStokesState start, double dt, int steps) {
    return integrate_impl(problem, std::move(start), dt, steps,
                          [](const BiotStokesProblem& p, const BiotStokesState& s, double h, double t) { return p.advance_biot(s, h, t); });
}

SimulationRecord run_simulation(const SimConfig& config, const RunHooks& hooks) {
    validate(config);
    const auto t0 = Clock::now();
    if (config.problem == ProblemKind::Plate) {
        const PlateStokesProblem problem(config, hooks.plate);
        return run_with(config, PlateAdapter{problem}, hooks, t0);
    }
    const BiotStokesProblem problem(config);
    return run_with(config, BiotAdapter{problem}, hooks, t0);
}

}  // namespace fpsi
