#include "fpsi/config.hpp"
#include "fpsi/diagnostics.hpp"
#include "fpsi/driver.hpp"
#include "fpsi/error.hpp"
#include "fpsi/export.hpp"
#include "fpsi/spectral.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>

namespace fs = std::filesystem;
using namespace fpsi;

namespace {

enum Exit { kOk = 0, kValidation = 1, kSolver = 2, kCheckFailed = 3 };

struct Common {
    std::string config_path;
    std::string preset_name;
    std::vector<std::string> overrides;
    std::string out = ".";
    bool check = false;
    bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool with_check) {
    auto* cfg = app->add_option("--config", c.config_path, "INI configuration file");
    app->add_option("--preset", c.preset_name, "named preset")->excludes(cfg)->check(CLI::IsMember(preset_names()));
    app->add_option("--set", c.overrides, "section.key=value override (repeatable)");
    app->add_option("--out", c.out, "output directory");
    app->add_flag("--quiet", c.quiet, "suppress progress output");
    if (with_check) app->add_flag("--check", c.check, "exit 3 when the documented threshold is missed");
}

SimConfig resolve(const Common& c) {
    SimConfig cfg = !c.preset_name.empty() ? preset(c.preset_name) : !c.config_path.empty() ? load_config_file(c.config_path) : SimConfig{};
    for (const auto& o : c.overrides) apply_override(cfg, o);
    validate(cfg);
    return cfg;
}

fs::path out_dir(const Common& c) {
    fs::path p(c.out);
    fs::create_directories(p);
    return p;
}

RunHooks progress_hooks(const Common& c, std::string label) {
    RunHooks h;
    if (!c.quiet)
        h.progress = [label](int n, double t) {
            if (n % 100 == 0) std::fprintf(stderr, "[%s] step %d t=%.5f\n", label.c_str(), n, t);
        };
    return h;
}

void write_record(const SimulationRecord& rec, const fs::path& dir, const std::string& stem) {
    export_data(rec, {ExportFormat::Csv, (dir / (stem + "_energy.csv")).string(), ExportWhat::EnergySeries});
    export_data(rec, {ExportFormat::Csv, (dir / (stem + "_profiles.csv")).string(), ExportWhat::InterfaceProfiles});
    export_data(rec, {ExportFormat::Svg, (dir / (stem + "_profiles.svg")).string(), ExportWhat::InterfaceProfiles});
    export_data(rec, {ExportFormat::Vtk, (dir / (stem + "_field.vtk")).string(), ExportWhat::FieldSnapshot});
    write_text_file((dir / (stem + "_config.ini")).string(), dump_config(rec.config));
}

int cmd_run(const Common& c) {
    const auto cfg = resolve(c);
    const auto dir = out_dir(c);
    const auto rec = run_simulation(cfg, progress_hooks(c, std::string(to_string(cfg.problem))));
    write_record(rec, dir, std::string(to_string(cfg.problem)));
    std::printf("problem %s: %d steps, %zu snapshots, max |displacement| %.6g cm, %.2f s wall\n", std::string(to_string(cfg.problem)).c_str(),
                rec.steps(), rec.snapshots.size(), rec.max_abs_displacement, rec.wall.total_seconds);
    return kOk;
}

int cmd_compare(const Common& c, bool all_snapshots) {
    auto cfg = resolve(c);
    auto plate_cfg = cfg, biot_cfg = cfg;
    plate_cfg.problem = ProblemKind::Plate;
    biot_cfg.problem = ProblemKind::Biot;
    auto fa = std::async(std::launch::async, [&] { return run_simulation(plate_cfg, progress_hooks(c, "plate")); });
    auto fb = std::async(std::launch::async, [&] { return run_simulation(biot_cfg, progress_hooks(c, "biot")); });
    const auto a = fa.get();
    const auto b = fb.get();
    const auto times = cfg.effective_snapshot_times();
    const auto report = all_snapshots ? compare_records(a, b) : compare_records(a, b, times);
    const auto dir = out_dir(c);
    write_record(a, dir, "plate");
    write_record(b, dir, "biot");
    export_data(report, {ExportFormat::Csv, (dir / "diff.csv").string(), ExportWhat::DiffReport});
    std::printf("%-10s %-14s %-14s\n", "t", "displacement", "pressure_jump");
    for (std::size_t i = 0; i < report.times.size(); ++i)
        std::printf("%-10.5f %-14.6g %-14.6g\n", report.times[i], report.displacement[i], report.pressure_jump[i]);
    const double limit = cfg.params.geometry.H < 0.005 ? 0.10 : 0.25;
    std::printf("max relative difference: displacement %.6g, pressure jump %.6g (limit %.2f)\n", report.max_displacement,
                report.max_pressure_jump, limit);
    if (c.check && (report.max_displacement > limit || report.max_pressure_jump > limit)) return kCheckFailed;
    return kOk;
}

int cmd_energy(const Common& c, double bump, double tol) {
    auto cfg = resolve(c);
    cfg.params.pulse.p_max = 0.0;
    cfg.params.q_plus = 0.0;
    if (cfg.initial_bump == 0.0) cfg.initial_bump = bump;
    const auto rec = run_simulation(cfg, progress_hooks(c, "energy"));
    const auto dir = out_dir(c);
    export_data(rec, {ExportFormat::Csv, (dir / "energy.csv").string(), ExportWhat::EnergySeries});
    const auto report = check_dissipation(rec, tol);
    std::printf("total energy %.6g -> %.6g over %d steps\n", rec.energy.front().total(), rec.energy.back().total(), rec.steps());
    std::printf("largest relative rise %.3g, energy identity defect %.3g\n", report.worst_excess,
                energy_identity_defect(rec.energy, cfg.dt));
    std::printf("dissipation check (tol %.1e): %s\n", tol, report.pass ? "pass" : "fail");
    if (!report.pass) std::printf("first violation at step %d\n", report.violations.front());
    return c.check && !report.pass ? kCheckFailed : kOk;
}

int cmd_wavespeed(const Common& c, const std::string& quantity) {
    const auto cfg = resolve(c);
    const auto rec = run_simulation(cfg, progress_hooks(c, "wavespeed"));
    const auto mk = moens_korteweg_speed(cfg.params.geometry, cfg.params.fluid, cfg.params.biot);
    const ProbeQuantity q = quantity == "displacement" ? ProbeQuantity::Displacement
                            : quantity == "pressure"   ? ProbeQuantity::FluidPressure
                                                       : ProbeQuantity::PressureJump;
    const double xp = cfg.effective_x_probe();
    std::printf("Moens-Korteweg speed %.6g cm/s, transit time to x = %.4g cm: %.6g s\n", mk.speed, xp, xp / mk.speed);
    for (double f : {0.1, 0.2, 0.3}) {
        const auto a = wave_arrival_time(rec, xp, f, q);
        if (a.arrived)
            std::printf("threshold %.1f: arrival %.6g s\n", f, a.time);
        else
            std::printf("threshold %.1f: no arrival\n", f);
    }
    const auto a = wave_arrival_time(rec, xp, cfg.arrival_threshold, q);
    const double expected = xp / mk.speed;
    const bool ok = a.arrived && std::abs(a.time - expected) <= 0.2 * expected;
    std::printf("arrival at threshold %.2f: %s (band +-20%%: %s)\n", cfg.arrival_threshold,
                a.arrived ? std::to_string(a.time).c_str() : "none", ok ? "inside" : "outside");
    write_record(rec, out_dir(c), "wavespeed");
    return c.check && !ok ? kCheckFailed : kOk;
}

int cmd_convergence(const Common& c, std::vector<double> dts) {
    const auto cfg = resolve(c);
    const auto rows = refinement_study(cfg, dts);
    write_text_file((out_dir(c) / "convergence.csv").string(), refinement_csv(rows));
    std::printf("%-10s %-12s %-12s %-12s %-12s %-12s %-12s %-8s\n", "dt", "sup|v|", "sup|[q]|", "sup|qbar|", "sup|u|", "sup|wxx|", "diff", "ratio");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::printf("%-10.3g %-12.5g %-12.5g %-12.5g %-12.5g %-12.5g %-12.5g", r.dt, r.sup_v, r.sup_qjump, r.sup_qbar, r.sup_u, r.sup_wxx,
                    r.diff_vs_half);
        if (i > 0 && r.diff_vs_half > 0) std::printf(" %-8.4g", rows[i - 1].diff_vs_half / r.diff_vs_half);
        std::printf("\n");
    }
    return kOk;
}

int cmd_spectrum(const SpectralConfig& sc, const std::string& out) {
    const auto r = spectral_abscissa(sc);
    fs::create_directories(out);
    export_data(r, {ExportFormat::Csv, (fs::path(out) / "spectrum.csv").string(), ExportWhat::SpectrumTable});
    write_text_file((fs::path(out) / "modes.csv").string(), modes_csv(r));
    std::printf("# %s\n", spectral_caveat().c_str());
    std::printf("modes %zu, eigenpairs %zu\n", r.modes.size(), r.spectrum.size());
    std::printf("spectral abscissa %.10g, mu0 estimate %.10g\n", -r.mu0_estimate, r.mu0_estimate);
    std::printf("max eigen residual %.3g, max energy-identity residual %.3g\n", r.max_residual, r.max_energy_residual);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fpsi: poroelastic plate / Biot layer coupled to Stokes flow"};
    app.require_subcommand(1);
    Common c;

    auto* run = app.add_subcommand("run", "run the configured problem");
    add_common(run, c, false);
    auto* compare = app.add_subcommand("compare", "run both problems and compare interface profiles");
    add_common(compare, c, true);
    bool all_snapshots = false;
    compare->add_flag("--all-snapshots", all_snapshots, "compare every recorded snapshot, not only the benchmark times");
    double bump = 0.05, tol = 1e-10;
    auto* energy = app.add_subcommand("energy", "zero-data energy decay audit");
    add_common(energy, c, true);
    energy->add_option("--bump", bump, "initial bump amplitude when the config has none");
    energy->add_option("--tol", tol, "dissipation tolerance");
    std::string quantity = "jump";
    auto* wave = app.add_subcommand("wavespeed", "pulse arrival time against Moens-Korteweg");
    add_common(wave, c, true);
    wave->add_option("--probe", quantity, "probed quantity")->check(CLI::IsMember({"jump", "displacement", "pressure"}));
    std::vector<double> dts{4e-4, 2e-4, 1e-4};
    auto* conv = app.add_subcommand("convergence", "time-step refinement study");
    add_common(conv, c, false);
    conv->add_option("--dt", dts, "decreasing time steps");
    SpectralConfig sc;
    std::string spec_out = ".";
    auto* spec = app.add_subcommand("spectrum", "per-mode spectral sweep");
    spec->add_option("--eps1", sc.eps1);
    spec->add_option("--eps2", sc.eps2);
    spec->add_option("--gamma-p", sc.gamma_p);
    spec->add_option("--beta", sc.beta);
    spec->add_option("--k-max", sc.k_max);
    spec->add_option("--nz", sc.nz);
    spec->add_option("--cutoff", sc.cutoff);
    spec->add_option("--out", spec_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run) return cmd_run(c);
        if (*compare) return cmd_compare(c, all_snapshots);
        if (*energy) return cmd_energy(c, bump, tol);
        if (*wave) return cmd_wavespeed(c, quantity);
        if (*conv) return cmd_convergence(c, dts);
        if (*spec) return cmd_spectrum(sc, spec_out);
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kValidation;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolver;
    }
    return kOk;
}
