#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsbmo/grid.hpp"
#include "nsbmo/norms.hpp"

namespace nsbmo {

using json = nlohmann::json;

/// A computed norm value with everything needed to recompute it.
struct NormReport {
  std::string name;
  double value = 0.0;
  json params = json::object();
};

void to_json(json& j, const NormReport& r);
void from_json(const json& j, NormReport& r);

json grid_json(const Grid& grid);
json carleson_json(const norms::CarlesonSettings& s);
norms::CarlesonSettings carleson_from_json(const json& j);

/// One JSON array of {name, value, params} records.
void write_reports_json(const std::vector<NormReport>& reports, const std::filesystem::path& path);

/// CSV with columns: label,name,value,T,s,p,q,L,N. Missing parameters stay empty.
void write_reports_csv(const std::vector<std::pair<std::string, NormReport>>& rows, const std::filesystem::path& path);

/// Writes text to path, replacing any previous file.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nsbmo
