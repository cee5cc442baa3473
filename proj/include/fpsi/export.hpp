#pragma once

#include "fpsi/diagnostics.hpp"
#include "fpsi/record.hpp"
#include "fpsi/spectral.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace fpsi {

enum class ExportFormat { Csv, Vtk, Svg };
enum class ExportWhat { EnergySeries, InterfaceProfiles, FieldSnapshot, SpectrumTable, DiffReport };

struct ExportSpec {
    ExportFormat format = ExportFormat::Csv;
    std::string path;
    ExportWhat what = ExportWhat::EnergySeries;
    int snapshot = -1;  // FieldSnapshot: index into record.snapshots, -1 for the last
};

// vtk only for field snapshots, svg only for interface profiles.
bool combination_allowed(ExportFormat format, ExportWhat what);
void validate(const ExportSpec& spec);

std::string_view to_string(ExportFormat f);
std::string_view to_string(ExportWhat w);
ExportFormat parse_export_format(std::string_view s);
ExportWhat parse_export_what(std::string_view s);

// Shortest text that reads back to the same double.
std::string format_double(double v);

std::string energy_csv(const SimulationRecord& record);
std::string profiles_csv(const SimulationRecord& record);
std::string field_csv(const SimulationRecord& record, int snapshot = -1);
std::string field_vtk(const SimulationRecord& record, int snapshot = -1);
std::string profiles_svg(const SimulationRecord& record);
std::string spectrum_csv(const SpectralResult& result);
std::string modes_csv(const SpectralResult& result);
std::string diff_csv(const DiffReport& report);
std::string refinement_csv(const std::vector<RefinementRow>& rows);

// Writes the payload selected by spec.what. Throws ValidationError for a combination outside the
// matrix or a payload/what mismatch, std::runtime_error on I/O failure.
void export_data(const SimulationRecord& record, const ExportSpec& spec);
void export_data(const SpectralResult& result, const ExportSpec& spec);
void export_data(const DiffReport& report, const ExportSpec& spec);

void write_text_file(const std::string& path, std::string_view contents);

}  // namespace fpsi
