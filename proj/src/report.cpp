#include "nsbmo/report.hpp"

#include <fstream>
#include <sstream>

#include "nsbmo/errors.hpp"

namespace nsbmo {

void to_json(json& j, const NormReport& r) { j = json{{"name", r.name}, {"value", r.value}, {"params", r.params}}; }

void from_json(const json& j, NormReport& r) {
  r.name = j.at("name").get<std::string>();
  r.value = j.at("value").get<double>();
  r.params = j.value("params", json::object());
}

json grid_json(const Grid& grid) { return {{"L", grid.side_length()}, {"N", grid.resolution()}}; }

json carleson_json(const norms::CarlesonSettings& s) {
  return {{"octaves", s.octaves}, {"substeps", s.substeps}, {"center_stride", s.center_stride}, {"gauss_points", s.gauss_points}};
}

norms::CarlesonSettings carleson_from_json(const json& j) {
  norms::CarlesonSettings s;
  s.octaves = j.value("octaves", s.octaves);
  s.substeps = j.value("substeps", s.substeps);
  s.center_stride = j.value("center_stride", s.center_stride);
  s.gauss_points = j.value("gauss_points", s.gauss_points);
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw FormatError("write failed: " + path.string());
}

void write_reports_json(const std::vector<NormReport>& reports, const std::filesystem::path& path) {
  write_text(path, json(reports).dump(2) + "\n");
}

namespace {

std::string cell(const json& params, const char* key) {
  if (!params.contains(key)) return "";
  const auto& v = params.at(key);
  if (v.is_number()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

void write_reports_csv(const std::vector<std::pair<std::string, NormReport>>& rows, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  out << "label,name,value,T,s,p,q,L,N\n";
  for (const auto& [label, r] : rows) {
    const json grid = r.params.value("grid", json::object());
    out << label << ',' << r.name << ',' << r.value << ',' << cell(r.params, "T") << ',' << cell(r.params, "s") << ','
        << cell(r.params, "p") << ',' << cell(r.params, "q") << ',' << cell(grid, "L") << ',' << cell(grid, "N") << '\n';
  }
  write_text(path, out.str());
}

}  // namespace nsbmo
