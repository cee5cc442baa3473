#pragma once

#include "fpsi/config.hpp"
#include "fpsi/mesh.hpp"

#include <vector>

namespace fpsi {

struct EnergyBudget {
    double e_kin = 0.0;
    double e_pot = 0.0;
    double dissipation_rate = 0.0;
    double boundary_power = 0.0;

    double total() const { return e_kin + e_pot; }
};

// Interface profiles live on the interface vertex grid. For the Biot problem the displacement is
// the mid-line eta_y and the pressure jump is -q on the lower face.
struct Snapshot {
    int step = 0;
    double t = 0.0;
    std::vector<double> displacement;
    std::vector<double> pressure_jump;
    std::vector<double> normal_velocity;
    std::vector<double> fluid_pressure;  // P1 vertex values on the fluid mesh
    std::vector<double> fluid_velocity;  // vertex values, [x | y]
};

struct WallClock {
    double setup_seconds = 0.0;
    double step_seconds = 0.0;
    double total_seconds = 0.0;
};

struct SimulationRecord {
    SimConfig config;
    std::vector<double> gamma_x;
    Mesh2D fluid_mesh;

    std::vector<double> times;  // snapshot times, starting at 0
    std::vector<Snapshot> snapshots;

    // one entry per time level, initial state included
    std::vector<double> step_times;
    std::vector<EnergyBudget> energy;
    std::vector<std::vector<double>> displacement_history;
    std::vector<std::vector<double>> jump_history;
    std::vector<std::vector<double>> pressure_history;  // fluid pressure on the interface

    double max_abs_displacement = 0.0;
    WallClock wall;

    int steps() const { return static_cast<int>(step_times.size()) - 1; }
};

}  // namespace fpsi
