#include "fpsi/export.hpp"

#include "fpsi/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fpsi {

bool combination_allowed(ExportFormat format, ExportWhat what) {
    switch (format) {
        case ExportFormat::Csv: return true;
        case ExportFormat::Vtk: return what == ExportWhat::FieldSnapshot;
        case ExportFormat::Svg: return what == ExportWhat::InterfaceProfiles;
    }
    return false;
}

void validate(const ExportSpec& spec) {
    if (spec.path.empty()) throw ValidationError("export path is empty");
    if (!combination_allowed(spec.format, spec.what))
        throw ValidationError("cannot export " + std::string(to_string(spec.what)) + " as " + std::string(to_string(spec.format)));
}

std::string_view to_string(ExportFormat f) {
    switch (f) {
        case ExportFormat::Csv: return "csv";
        case ExportFormat::Vtk: return "vtk";
        case ExportFormat::Svg: return "svg";
    }
    return "?";
}

std::string_view to_string(ExportWhat w) {
    switch (w) {
        case ExportWhat::EnergySeries: return "energy_series";
        case ExportWhat::InterfaceProfiles: return "interface_profiles";
        case ExportWhat::FieldSnapshot: return "field_snapshot";
        case ExportWhat::SpectrumTable: return "spectrum_table";
        case ExportWhat::DiffReport: return "diff_report";
    }
    return "?";
}

ExportFormat parse_export_format(std::string_view s) {
    for (auto f : {ExportFormat::Csv, ExportFormat::Vtk, ExportFormat::Svg})
        if (to_string(f) == s) return f;
    throw ValidationError("unknown export format '" + std::string(s) + "'");
}

ExportWhat parse_export_what(std::string_view s) {
    for (auto w : {ExportWhat::EnergySeries, ExportWhat::InterfaceProfiles, ExportWhat::FieldSnapshot, ExportWhat::SpectrumTable,
                   ExportWhat::DiffReport})
        if (to_string(w) == s) return w;
    throw ValidationError("unknown export payload '" + std::string(s) + "'");
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

class Csv {
public:
    explicit Csv(std::initializer_list<std::string_view> header) {
        bool first = true;
        for (auto h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }
    Csv& row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_double(v);
            first = false;
        }
        out_ << '\n';
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

const Snapshot& pick(const SimulationRecord& r, int index) {
    if (r.snapshots.empty()) throw ValidationError("record has no snapshots");
    if (index < 0) return r.snapshots.back();
    if (index >= static_cast<int>(r.snapshots.size())) throw ValidationError("snapshot index out of range");
    return r.snapshots[index];
}

}  // namespace

std::string energy_csv(const SimulationRecord& r) {
    Csv csv{"t", "e_kin", "e_pot", "dissipation_rate", "boundary_power", "total"};
    for (std::size_t n = 0; n < r.energy.size(); ++n) {
        const auto& e = r.energy[n];
        csv.row({r.step_times[n], e.e_kin, e.e_pot, e.dissipation_rate, e.boundary_power, e.total()});
    }
    return csv.str();
}

std::string profiles_csv(const SimulationRecord& r) {
    Csv csv{"t", "x", "displacement", "pressure_jump", "normal_velocity"};
    for (const auto& s : r.snapshots)
        for (std::size_t i = 0; i < r.gamma_x.size(); ++i) csv.row({s.t, r.gamma_x[i], s.displacement[i], s.pressure_jump[i], s.normal_velocity[i]});
    return csv.str();
}

std::string field_csv(const SimulationRecord& r, int index) {
    const auto& s = pick(r, index);
    const auto& m = r.fluid_mesh;
    const std::size_t n = m.vertices.size();
    Csv csv{"x", "y", "pressure", "ux", "uy"};
    for (std::size_t v = 0; v < n; ++v) csv.row({m.vertices[v].x, m.vertices[v].y, s.fluid_pressure[v], s.fluid_velocity[v], s.fluid_velocity[n + v]});
    return csv.str();
}

std::string field_vtk(const SimulationRecord& r, int index) {
    const auto& s = pick(r, index);
    const auto& m = r.fluid_mesh;
    const std::size_t n = m.vertices.size();
    std::ostringstream o;
    o << "# vtk DataFile Version 3.0\n";
    o << "fluid snapshot step " << s.step << " t " << format_double(s.t) << "\n";
    o << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    o << "POINTS " << n << " double\n";
    for (const auto& p : m.vertices) o << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
    o << "CELLS " << m.triangles.size() << ' ' << 4 * m.triangles.size() << '\n';
    for (const auto& t : m.triangles) o << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    o << "CELL_TYPES " << m.triangles.size() << '\n';
    for (std::size_t i = 0; i < m.triangles.size(); ++i) o << "5\n";
    o << "POINT_DATA " << n << '\n';
    o << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < n; ++v) o << format_double(s.fluid_pressure[v]) << '\n';
    o << "VECTORS velocity double\n";
    for (std::size_t v = 0; v < n; ++v) o << format_double(s.fluid_velocity[v]) << ' ' << format_double(s.fluid_velocity[n + v]) << " 0\n";
    return o.str();
}

namespace {

void svg_panel(std::ostringstream& o, const SimulationRecord& r, bool jump, double top, double height, double width) {
    const double left = 70, right = 20;
    const double pw = width - left - right;
    double lo = 0, hi = 0;
    for (const auto& s : r.snapshots)
        for (double v : jump ? s.pressure_jump : s.displacement) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi == lo) hi = lo + 1;
    const double x0 = r.gamma_x.front(), x1 = r.gamma_x.back();
    auto X = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return top + height - (y - lo) / (hi - lo) * height; };
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << height
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left << "\" y=\"" << top - 6 << "\" font-size=\"12\">" << (jump ? "pressure jump" : "displacement")
      << " (max " << format_double(hi) << ", min " << format_double(lo) << ")</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        const auto& s = r.snapshots[k];
        const auto& v = jump ? s.pressure_jump : s.displacement;
        o << "<polyline fill=\"none\" stroke=\"" << colors[k % 8] << "\" points=\"";
        for (std::size_t i = 0; i < v.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(r.gamma_x[i]), Y(v[i]));
            o << buf;
        }
        o << "\"/>\n";
    }
}

}  // namespace

std::string profiles_svg(const SimulationRecord& r) {
    if (r.snapshots.empty() || r.gamma_x.size() < 2) throw ValidationError("record has no profiles to plot");
    const double width = 800, panel = 200;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << 2 * panel + 110 << "\">\n";
    svg_panel(o, r, false, 30, panel, width);
    svg_panel(o, r, true, 60 + panel, panel, width);
    o << "<text x=\"70\" y=\"" << 2 * panel + 85 << "\" font-size=\"12\">x from " << format_double(r.gamma_x.front()) << " to "
      << format_double(r.gamma_x.back()) << " cm; snapshots at t =";
    for (const auto& s : r.snapshots) o << ' ' << format_double(s.t);
    o << " s</text>\n</svg>\n";
    return o.str();
}

std::string spectrum_csv(const SpectralResult& result) {
    Csv csv{"k1", "k2", "re", "im", "residual"};
    for (const auto& e : result.spectrum) csv.row({e.k1, e.k2, e.lambda.real(), e.lambda.imag(), e.residual});
    return csv.str();
}

std::string modes_csv(const SpectralResult& result) {
    Csv csv{"n1", "n2", "finite_count", "max_real", "max_residual", "max_energy_residual"};
    for (const auto& m : result.modes)
        csv.row({double(m.n1), double(m.n2), double(m.finite_count), m.max_real, m.max_residual, m.max_energy_residual});
    return csv.str();
}

std::string diff_csv(const DiffReport& report) {
    Csv csv{"t", "displacement", "pressure_jump"};
    for (std::size_t i = 0; i < report.times.size(); ++i) csv.row({report.times[i], report.displacement[i], report.pressure_jump[i]});
    return csv.str();
}

std::string refinement_csv(const std::vector<RefinementRow>& rows) {
    Csv csv{"dt", "sup_v", "sup_qjump", "sup_qbar", "sup_u", "sup_wxx", "diff_vs_half"};
    for (const auto& r : rows) csv.row({r.dt, r.sup_v, r.sup_qjump, r.sup_qbar, r.sup_u, r.sup_wxx, r.diff_vs_half});
    return csv.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("write to " + path + " failed");
}

void export_data(const SimulationRecord& record, const ExportSpec& spec) {
    validate(spec);
    switch (spec.what) {
        case ExportWhat::EnergySeries: return write_text_file(spec.path, energy_csv(record));
        case ExportWhat::InterfaceProfiles:
            return write_text_file(spec.path, spec.format == ExportFormat::Svg ? profiles_svg(record) : profiles_csv(record));
        case ExportWhat::FieldSnapshot:
            return write_text_file(spec.path, spec.format == ExportFormat::Vtk ? field_vtk(record, spec.snapshot) : field_csv(record, spec.snapshot));
        default: throw ValidationError("a simulation record cannot be exported as " + std::string(to_string(spec.what)));
    }
}

void export_data(const SpectralResult& result, const ExportSpec& spec) {
    validate(spec);
    if (spec.what != ExportWhat::SpectrumTable) throw ValidationError("a spectral result exports only as spectrum_table");
    write_text_file(spec.path, spectrum_csv(result));
}

void export_data(const DiffReport& report, const ExportSpec& spec) {
    validate(spec);
    if (spec.what != ExportWhat::DiffReport) throw ValidationError("a diff report exports only as diff_report");
    write_text_file(spec.path, diff_csv(report));
}

}  // namespace fpsi
