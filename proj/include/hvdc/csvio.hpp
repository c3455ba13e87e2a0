#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hvdc/types.hpp"

namespace hvdc {

/// Thrown on malformed CSV input; carries the byte offset of the failure.
struct CsvError : std::runtime_error {
  CsvError(const std::string& msg, std::size_t byte_offset)
      : std::runtime_error(msg + " (byte offset " +
                           std::to_string(byte_offset) + ")"),
        offset(byte_offset) {}
  std::size_t offset;
};

/// Waveform CSV: header `t,i_pos,i_neg,vl_pos,vl_neg,vr_pos,vr_neg`,
/// SI units (s, kA, kV), LF line endings, shortest round-trip doubles.
void write_waveform_csv(const std::filesystem::path& path,
                        const WaveformRecord& rec);
std::vector<SensorFrame> read_waveform_csv(const std::filesystem::path& path);

struct ManifestRow {
  std::string id;
  std::string line;
  std::string kind;
  double location_km = 0.0;
  double impedance_ohm = 0.0;
  int label = 0;
  double arrival_time = -1.0; // -1 for no-fault records
};

void write_manifest_csv(const std::filesystem::path& path,
                        const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> read_manifest_csv(const std::filesystem::path& path);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

} // namespace hvdc
