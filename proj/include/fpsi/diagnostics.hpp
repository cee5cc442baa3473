#pragma once

#include "fpsi/biot_stokes.hpp"
#include "fpsi/plate_stokes.hpp"
#include "fpsi/record.hpp"

#include <span>
#include <vector>

namespace fpsi {

EnergyBudget energy_budget(const PlateStokesProblem& problem, const PlateStokesState& state);
EnergyBudget energy_budget(const BiotStokesProblem& problem, const BiotStokesState& state);

struct DissipationReport {
    bool pass = true;
    std::vector<int> violations;  // index n + 1 where total rose above total_n + tol * total_0
    double worst_excess = 0.0;    // largest (total_{n+1} - total_n) / total_0
};

DissipationReport check_dissipation(std::span<const EnergyBudget> series, double tol);
DissipationReport check_dissipation(const SimulationRecord& record, double tol);

// Largest |total_{n+1} - total_n + dt * dissipation_{n+1} - dt * boundary_power_{n+1}|, relative to total_0
// (or to the largest total when the run starts at rest).
double energy_identity_defect(std::span<const EnergyBudget> series, double dt);

// FluidPressure samples the fluid pressure along the interface.
enum class ProbeQuantity { PressureJump, Displacement, FluidPressure };

struct ArrivalResult {
    bool arrived = false;
    double time = 0.0;
};

// First time |series| reaches threshold_fraction * max |series|, linearly interpolated.
ArrivalResult wave_arrival_time(std::span<const double> times, std::span<const double> series, double threshold_fraction);
ArrivalResult wave_arrival_time(const SimulationRecord& record, double x_probe, double threshold_fraction,
                                ProbeQuantity quantity = ProbeQuantity::PressureJump);
std::vector<double> probe_series(const SimulationRecord& record, double x_probe, ProbeQuantity quantity);

// L2 norm of a continuous piecewise-linear profile on the grid x.
double profile_l2(std::span<const double> x, std::span<const double> values);

struct DiffReport {
    std::vector<double> times;
    std::vector<double> displacement;
    std::vector<double> pressure_jump;
    double max_displacement = 0.0;
    double max_pressure_jump = 0.0;
};

constexpr double kComparisonFloor = 1e-12;

double relative_difference(std::span<const double> x, std::span<const double> a, std::span<const double> b,
                           double floor = kComparisonFloor);

// Compares snapshots shared by both records; restricted to `times` when given.
DiffReport compare_records(const SimulationRecord& a, const SimulationRecord& b, std::span<const double> times = {});

struct RefinementRow {
    double dt = 0.0;
    double sup_v = 0.0;
    double sup_qjump = 0.0;
    double sup_qbar = 0.0;
    double sup_u = 0.0;
    double sup_wxx = 0.0;
    double diff_vs_half = 0.0;  // max over common times of the energy norm of sol(dt) - sol(dt/2)
};

// Problem I only: runs each dt in lockstep with dt/2.
std::vector<RefinementRow> refinement_study(const SimConfig& config, std::span<const double> dt_list);

// Energy norm sqrt(2 (e_kin + e_pot)) of the difference of two states.
double energy_norm_difference(const PlateStokesProblem& problem, const PlateStokesState& a, const PlateStokesState& b);

}  // namespace fpsi
