#include "fpsi/diagnostics.hpp"

#include "fpsi/error.hpp"

#include <algorithm>
#include <cmath>

namespace fpsi {

EnergyBudget energy_budget(const PlateStokesProblem& problem, const PlateStokesState& s) {
    const auto& ops = problem.operators();
    const auto& f = problem.params().fluid;
    const auto pc = problem.params().plate();
    const double H = problem.params().geometry.H;
    EnergyBudget e;
    e.e_kin = 0.5 * (f.rho_f * ops.fluid_mass.quadratic_form(s.u) + pc.rho_p * H * ops.plate_mass.quadratic_form(s.v));
    e.e_pot = 0.5 * (pc.gamma_p * H * ops.plate_mass.quadratic_form(s.w) + pc.D * H * H * H * ops.plate_bending.quadratic_form(s.w) +
                     pc.c0_p * (H * ops.jump_mass.quadratic_form(s.qbar) + H / 12.0 * ops.jump_mass.quadratic_form(s.qjump)));
    std::vector<double> mix(s.qbar.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = s.qbar[i] + 0.5 * s.qjump[i];
    e.dissipation_rate = pc.kappa_p / H * ops.jump_mass.quadratic_form(s.qjump) + 12.0 * pc.kappa_p / H * ops.jump_mass.quadratic_form(mix) +
                         f.mu_f * ops.fluid_strain.quadratic_form(s.u) + f.beta * ops.slip.quadratic_form(s.u);
    e.boundary_power = problem.inlet_traction_work(s);
    return e;
}

EnergyBudget energy_budget(const BiotStokesProblem& problem, const BiotStokesState& s) {
    const auto& ops = problem.operators();
    const auto& f = problem.params().fluid;
    const auto& b = problem.params().biot;
    EnergyBudget e;
    e.e_kin = 0.5 * (f.rho_f * ops.fluid_mass.quadratic_form(s.u) + b.rho_b * ops.solid_mass.quadratic_form(s.xi));
    e.e_pot = 0.5 * (b.mu_b * ops.solid_strain.quadratic_form(s.eta) + b.lambda_b * ops.solid_divdiv.quadratic_form(s.eta) +
                     b.gamma * ops.solid_mass.quadratic_form(s.eta) + b.c0 * ops.pore_mass.quadratic_form(s.q));
    const auto x = problem.pack(s);
    e.dissipation_rate = f.mu_f * ops.fluid_strain.quadratic_form(s.u) + b.kappa * ops.pore_stiffness.quadratic_form(s.q) +
                         f.beta * ops.slip.quadratic_form(x) +
                         problem.nitsche().penalty / problem.nitsche().h * ops.penalty.quadratic_form(x);
    e.boundary_power = problem.inlet_traction_work(s);
    return e;
}

DissipationReport check_dissipation(std::span<const EnergyBudget> series, double tol) {
    DissipationReport r;
    if (series.size() < 2) return r;
    const double e0 = series.front().total();
    const double scale = e0 > 0 ? e0 : 1.0;
    for (std::size_t n = 0; n + 1 < series.size(); ++n) {
        const double rise = series[n + 1].total() - series[n].total();
        r.worst_excess = std::max(r.worst_excess, rise / scale);
        if (series[n + 1].total() > series[n].total() + tol * e0) r.violations.push_back(static_cast<int>(n + 1));
    }
    r.pass = r.violations.empty();
    return r;
}

DissipationReport check_dissipation(const SimulationRecord& record, double tol) { return check_dissipation(record.energy, tol); }

double energy_identity_defect(std::span<const EnergyBudget> series, double dt) {
    if (series.size() < 2) return 0.0;
    double ref = series.front().total();
    if (!(ref > 0))
        for (const auto& e : series) ref = std::max(ref, e.total());
    if (!(ref > 0)) ref = 1.0;
    double worst = 0;
    for (std::size_t n = 0; n + 1 < series.size(); ++n) {
        const auto& a = series[n];
        const auto& b = series[n + 1];
        worst = std::max(worst, std::abs(b.total() - a.total() + dt * b.dissipation_rate - dt * b.boundary_power));
    }
    return worst / ref;
}

ArrivalResult wave_arrival_time(std::span<const double> times, std::span<const double> series, double threshold_fraction) {
    if (times.size() != series.size()) throw ValidationError("probe series and times differ in length");
    double peak = 0;
    for (double v : series) peak = std::max(peak, std::abs(v));
    if (!(peak > 0) || !(threshold_fraction > 0)) return {};
    const double level = threshold_fraction * peak;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double a = std::abs(series[i]);
        if (a < level) continue;
        if (i == 0) return {true, times[0]};
        const double p = std::abs(series[i - 1]);
        const double theta = (level - p) / (a - p);
        return {true, times[i - 1] + theta * (times[i] - times[i - 1])};
    }
    return {};
}

namespace {

double sample_profile(std::span<const double> x, std::span<const double> v, double xp) {
    if (xp <= x.front()) return v.front();
    if (xp >= x.back()) return v.back();
    const auto it = std::upper_bound(x.begin(), x.end(), xp);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double theta = (xp - x[i - 1]) / (x[i] - x[i - 1]);
    return (1 - theta) * v[i - 1] + theta * v[i];
}

}  // namespace

std::vector<double> probe_series(const SimulationRecord& record, double x_probe, ProbeQuantity quantity) {
    const auto& hist = quantity == ProbeQuantity::PressureJump ? record.jump_history
                       : quantity == ProbeQuantity::Displacement ? record.displacement_history
                                                                 : record.pressure_history;
    if (record.gamma_x.empty()) throw ValidationError("record has no interface grid");
    if (x_probe < record.gamma_x.front() || x_probe > record.gamma_x.back()) throw ValidationError("x_probe outside the interface");
    std::vector<double> out;
    out.reserve(hist.size());
    for (const auto& profile : hist) out.push_back(sample_profile(record.gamma_x, profile, x_probe));
    return out;
}

ArrivalResult wave_arrival_time(const SimulationRecord& record, double x_probe, double threshold_fraction, ProbeQuantity quantity) {
    const auto series = probe_series(record, x_probe, quantity);
    if (series.size() != record.step_times.size()) throw ValidationError("record histories are incomplete");
    return wave_arrival_time(record.step_times, series, threshold_fraction);
}

double profile_l2(std::span<const double> x, std::span<const double> v) {
    if (x.size() != v.size()) throw ValidationError("profile and grid differ in length");
    double s = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        s += h / 3.0 * (v[i] * v[i] + v[i] * v[i + 1] + v[i + 1] * v[i + 1]);
    }
    return std::sqrt(std::max(s, 0.0));
}

double relative_difference(std::span<const double> x, std::span<const double> a, std::span<const double> b, double floor) {
    if (a.size() != b.size()) throw DomainError("profiles live on different grids");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    const double denom = std::max({profile_l2(x, a), profile_l2(x, b), floor});
    return profile_l2(x, d) / denom;
}

namespace {

const Snapshot* find_snapshot(const SimulationRecord& r, double t) {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    for (const auto& s : r.snapshots)
        if (std::abs(s.t - t) <= tol) return &s;
    return nullptr;
}

}  // namespace

DiffReport compare_records(const SimulationRecord& a, const SimulationRecord& b, std::span<const double> times) {
    if (a.gamma_x.size() != b.gamma_x.size()) throw DomainError("records use different interface grids");
    for (std::size_t i = 0; i < a.gamma_x.size(); ++i)
        if (std::abs(a.gamma_x[i] - b.gamma_x[i]) > 1e-12 * std::max(1.0, std::abs(a.gamma_x[i])))
            throw DomainError("records use different interface grids");
    std::vector<double> wanted(times.begin(), times.end());
    if (wanted.empty())
        for (const auto& s : a.snapshots)
            if (find_snapshot(b, s.t)) wanted.push_back(s.t);
    if (wanted.empty()) throw DomainError("records share no snapshot times");
    DiffReport r;
    for (double t : wanted) {
        const auto* sa = find_snapshot(a, t);
        const auto* sb = find_snapshot(b, t);
        if (!sa || !sb) throw DomainError("snapshot time " + std::to_string(t) + " missing from a record");
        const double dw = relative_difference(a.gamma_x, sa->displacement, sb->displacement);
        const double dq = relative_difference(a.gamma_x, sa->pressure_jump, sb->pressure_jump);
        r.times.push_back(t);
        r.displacement.push_back(dw);
        r.pressure_jump.push_back(dq);
        r.max_displacement = std::max(r.max_displacement, dw);
        r.max_pressure_jump = std::max(r.max_pressure_jump, dq);
    }
    return r;
}

double energy_norm_difference(const PlateStokesProblem& problem, const PlateStokesState& a, const PlateStokesState& b) {
    auto diff = [](const std::vector<double>& x, const std::vector<double>& y) {
        std::vector<double> d(x.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - y[i];
        return d;
    };
    PlateStokesState d;
    d.t = a.t;
    d.u = diff(a.u, b.u);
    d.pi = diff(a.pi, b.pi);
    d.w = diff(a.w, b.w);
    d.v = diff(a.v, b.v);
    d.qjump = diff(a.qjump, b.qjump);
    d.qbar = diff(a.qbar, b.qbar);
    const auto e = energy_budget(problem, d);
    return std::sqrt(2.0 * std::max(e.total(), 0.0));
}

std::vector<RefinementRow> refinement_study(const SimConfig& config, std::span<const double> dt_list) {
    validate(config);
    for (std::size_t i = 0; i < dt_list.size(); ++i) {
        if (!(dt_list[i] > 0)) throw ValidationError("refinement dt must be positive");
        if (i > 0 && !(dt_list[i] < dt_list[i - 1])) throw ValidationError("refinement dt_list must be decreasing");
        const double n = config.t_end / dt_list[i];
        if (std::abs(n - std::round(n)) > 1e-6 * std::max(1.0, n)) throw ValidationError("each refinement dt must divide t_end");
    }
    // Two problem instances keep both factorizations cached.
    const PlateStokesProblem coarse(config), fine(config);
    std::vector<RefinementRow> rows;
    for (double dt : dt_list) {
        RefinementRow row;
        row.dt = dt;
        const int steps = static_cast<int>(std::lround(config.t_end / dt));
        auto a = config.initial_bump != 0 ? coarse.bump_state(config.initial_bump) : coarse.zero_state();
        auto b = a;
        const auto& ops = coarse.operators();
        auto sup = [&](const PlateStokesState& s) {
            row.sup_v = std::max(row.sup_v, std::sqrt(ops.plate_mass.quadratic_form(s.v)));
            row.sup_qjump = std::max(row.sup_qjump, std::sqrt(ops.jump_mass.quadratic_form(s.qjump)));
            row.sup_qbar = std::max(row.sup_qbar, std::sqrt(ops.jump_mass.quadratic_form(s.qbar)));
            row.sup_u = std::max(row.sup_u, std::sqrt(ops.fluid_mass.quadratic_form(s.u)));
            row.sup_wxx = std::max(row.sup_wxx, std::sqrt(ops.plate_bending.quadratic_form(s.w)));
        };
        sup(a);
        for (int n = 1; n <= steps; ++n) {
            const double t = n * dt;
            a = coarse.advance(a, dt, t);
            b = fine.advance(b, 0.5 * dt, (2 * n - 1) * 0.5 * dt);
            b = fine.advance(b, 0.5 * dt, t);
            sup(a);
            row.diff_vs_half = std::max(row.diff_vs_half, energy_norm_difference(coarse, a, b));
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fpsi
