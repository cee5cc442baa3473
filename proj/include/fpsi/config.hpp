#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpsi {

// All quantities are CGS.

struct FluidParams {
    double rho_f = 1.0;
    double mu_f = 0.035;
    double beta = 1.0;
};

struct BulkBiotParams {
    double rho_b = 1.1;
    double lambda_b = 1.7e6;
    double mu_b = 5.58e5;
    double kappa = 1e-8;
    double c0 = 1e-3;
    double alpha = 1.0;
    double gamma = 4e6;
};

struct PlateCoeffs {
    double rho_p = 0.0;
    double D = 0.0;
    double gamma_p = 0.0;
    double c0_p = 0.0;
    double alpha_p = 0.0;
    double kappa_p = 0.0;
};

struct Geometry {
    double L = 5.0;
    double R_f = 0.5;
    double H = 0.01;
};

struct PulseSpec {
    double p_max = 13333.0;
    double t_pulse = 0.003;
};

struct PhysicalParams {
    FluidParams fluid;
    BulkBiotParams biot;
    Geometry geometry;
    PulseSpec pulse;
    double q_plus = 0.0;  // drained pore pressure on the outer plate face

    PlateCoeffs plate() const;
};

enum class ProblemKind { Plate, Biot };

std::string_view to_string(ProblemKind p);

struct SimConfig {
    PhysicalParams params;
    int nx_f = 300;
    int ny_f = 25;
    int nx_p = 300;
    int ny_p = 3;
    double dt = 5e-5;
    double t_end = 0.04;
    ProblemKind problem = ProblemKind::Plate;
    std::optional<double> nitsche_penalty;  // unset: 10 * max(mu_f, 1)
    int cadence = 100;
    std::optional<double> x_probe;  // unset: L
    double arrival_threshold = 0.2;
    double initial_bump = 0.0;  // amplitude of a clamped initial plate/layer deflection, cm
    std::vector<double> snapshot_times;  // empty: chosen from H

    double effective_nitsche_penalty() const;
    double effective_x_probe() const;
    std::vector<double> effective_snapshot_times() const;
    int step_count() const;
};

struct WaveSpeed {
    double speed;
    double transit_time;
};

PlateCoeffs derive_plate_coefficients(const BulkBiotParams& bulk);
WaveSpeed moens_korteweg_speed(const Geometry& geom, const FluidParams& fluid, const BulkBiotParams& bulk);
double inlet_pressure(double t, const PulseSpec& pulse);

// Throws ValidationError naming the first violated invariant.
void validate(const SimConfig& cfg);

SimConfig load_config(std::string_view text);
SimConfig load_config_file(const std::string& path);

// Applies one "section.key=value" (or bare "key=value") override. Call validate() after the last one.
void apply_override(SimConfig& cfg, std::string_view assignment);

SimConfig preset(std::string_view name);
std::vector<std::string> preset_names();

std::string dump_config(const SimConfig& cfg);

}  // namespace fpsi
