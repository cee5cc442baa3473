#pragma once

#include "fpsi/biot_stokes.hpp"
#include "fpsi/plate_stokes.hpp"
#include "fpsi/record.hpp"

#include <functional>

namespace fpsi {

struct RunHooks {
    PlateStokesOptions plate;                        // Problem I verification hooks
    std::function<void(int step, double t)> progress;  // called after every step
};

// Runs config.problem to t_end. Throws SolverError naming the failing step.
SimulationRecord run_simulation(const SimConfig& config, const RunHooks& hooks = {});

// Advances `steps` steps of size dt. Step times are (n0 + k) dt with n0 = round(start.t / dt), so a
// run split at any step reproduces the uninterrupted trajectory bitwise.
PlateStokesState integrate(const PlateStokesProblem& problem, PlateStokesState start, double dt, int steps);
BiotStokesState integrate(const BiotStokesProblem& problem, BiotStokesState start, double dt, int steps);

// Steps selected for snapshots: every cadence-th step plus the step nearest each requested time.
std::vector<int> snapshot_steps(const SimConfig& config);

}  // namespace fpsi
