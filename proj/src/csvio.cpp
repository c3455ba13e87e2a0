#include "hvdc/csvio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hvdc {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kWaveformHeader =
    "t,i_pos,i_neg,vl_pos,vl_neg,vr_pos,vr_neg";

double parse_double(std::string_view tok, std::size_t offset) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw CsvError("malformed number '" + std::string(tok) + "'", offset);
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

} // namespace

void write_waveform_csv(const std::filesystem::path& path,
                        const WaveformRecord& rec) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path.string());
  os << kWaveformHeader << "\n";
  for (const auto& f : rec.frames) {
    os << format_double(f.t);
    for (int c = 0; c < kNumChannels; ++c) os << ',' << format_double(f.channel(c));
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<SensorFrame> read_waveform_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(is, line))
    throw CsvError("empty waveform file", 0);
  if (line != kWaveformHeader)
    throw CsvError("bad waveform header '" + line + "'", 0);
  offset += line.size() + 1;

  std::vector<SensorFrame> frames;
  while (std::getline(is, line)) {
    if (line.empty()) {
      offset += 1;
      continue;
    }
    auto toks = split(line);
    if (toks.size() != 7)
      throw CsvError("expected 7 columns, got " + std::to_string(toks.size()),
                     offset);
    SensorFrame f;
    f.t = parse_double(toks[0], offset);
    for (int c = 0; c < kNumChannels; ++c)
      f.channel(c) = parse_double(toks[c + 1], offset);
    frames.push_back(f);
    offset += line.size() + 1;
  }
  return frames;
}

void write_manifest_csv(const std::filesystem::path& path,
                        const std::vector<ManifestRow>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path.string());
  os << "id,line,kind,location_km,impedance_ohm,label,arrival_time\n";
  for (const auto& r : rows) {
    os << r.id << ',' << r.line << ',' << r.kind << ','
       << format_double(r.location_km) << ',' << format_double(r.impedance_ohm)
       << ',' << r.label << ',' << format_double(r.arrival_time) << '\n';
  }
}

std::vector<ManifestRow> read_manifest_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(is, line) ||
      line != "id,line,kind,location_km,impedance_ohm,label,arrival_time")
    throw CsvError("bad manifest header", 0);
  offset += line.size() + 1;
  std::vector<ManifestRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto toks = split(line);
    if (toks.size() != 7) throw CsvError("expected 7 columns", offset);
    ManifestRow r;
    r.id = std::string(toks[0]);
    r.line = std::string(toks[1]);
    r.kind = std::string(toks[2]);
    r.location_km = parse_double(toks[3], offset);
    r.impedance_ohm = parse_double(toks[4], offset);
    r.label = static_cast<int>(parse_double(toks[5], offset));
    r.arrival_time = parse_double(toks[6], offset);
    rows.push_back(r);
    offset += line.size() + 1;
  }
  return rows;
}

} // namespace hvdc
