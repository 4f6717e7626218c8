#include "nsbmo/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "nsbmo/duhamel.hpp"
#include "nsbmo/parallel.hpp"
#include "nsbmo/random_fields.hpp"
#include "nsbmo/scaling.hpp"

namespace nsbmo::solver {

using json = nlohmann::json;

namespace {

constexpr std::pair<NormPair, const char*> kPairNames[] = {
    {NormPair::xx, "xx"}, {NormPair::x_dbmo, "x_dbmo"}, {NormPair::xy, "xy"}, {NormPair::l4l4, "l4l4"}, {NormPair::xl4, "xl4"}};

double l4l4(const VectorTrajectory& u, double T) { return norms::lpt_lqx_norm(u, 4.0, 4.0, T); }

double dbmo_sup(const VectorTrajectory& b, const norms::CarlesonSettings& s) {
  // A handful of nodes spread over the window; the quantity is a sup in t.
  const std::size_t last = b.size() - 1;
  double best = 0.0;
  for (std::size_t m : {last / 4, last / 2, last}) {
    if (m == 0) continue;
    best = std::max(best, norms::dbmo_norm(b.slice(m), s));
  }
  return best;
}

double ratio(const VectorTrajectory& u, const VectorTrajectory& v, NormPair pair, const norms::CarlesonSettings& s) {
  const double T = u.horizon();
  double den = 0.0;
  switch (pair) {
    case NormPair::xx:
    case NormPair::x_dbmo: den = norms::xt_norm(u, T, s) * norms::xt_norm(v, T, s); break;
    case NormPair::xy: den = norms::xt_norm(u, T, s) * norms::yt_norm(v, T); break;
    case NormPair::l4l4: den = l4l4(u, T) * l4l4(v, T); break;
    case NormPair::xl4: den = norms::xt_norm(u, T, s) * l4l4(v, T); break;
  }
  if (!(den > 0.0)) return -1.0;
  const auto b = duhamel_bilinear(u, v);
  double num = 0.0;
  switch (pair) {
    case NormPair::xx: num = norms::xt_norm(b, T, s); break;
    case NormPair::x_dbmo: num = dbmo_sup(b, s); break;
    case NormPair::xy: num = norms::yt_norm(b, T); break;
    case NormPair::l4l4:
    case NormPair::xl4: num = l4l4(b, T); break;
  }
  return num / den;
}

}  // namespace

std::string to_string(NormPair p) {
  for (const auto& [k, name] : kPairNames) {
    if (k == p) return name;
  }
  return "unknown";
}

NormPair norm_pair_from_string(const std::string& name) {
  for (const auto& [k, n] : kPairNames) {
    if (name == n) return k;
  }
  throw InputError("unknown norm pair '" + name + "'");
}

std::vector<NormPair> all_norm_pairs() { return {NormPair::xx, NormPair::x_dbmo, NormPair::xy, NormPair::l4l4, NormPair::xl4}; }

VectorTrajectory probe_trajectory(const Grid& grid, const std::vector<double>& times, std::uint64_t seed) {
  const Grid base(grid.side_length(), std::min(grid.resolution(), 32));
  sampling::SpectrumSpec spec;
  spec.slope = 1.0 + 0.5 * static_cast<double>(seed % 5);
  const auto f = spectral::resample(sampling::random_divergence_free(base, seed, spec), grid.resolution());
  return heat_trajectory(f, times);
}

std::vector<double> bilinear_ratios(const Grid& grid, const std::vector<double>& times, NormPair pair, int count,
                                    std::uint64_t base_seed, const norms::CarlesonSettings& settings) {
  if (count < 1) throw InputError("bilinear_ratios: count must be positive");
  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  parallel_for(out.size(), [&](std::size_t i) {
    std::uint64_t seed = base_seed + 2 * i;
    for (int attempt = 0; attempt < 8; ++attempt, seed += 1'000'003) {
      const auto u = probe_trajectory(grid, times, seed);
      const auto v = probe_trajectory(grid, times, seed + 1);
      const double r = ratio(u, v, pair, settings);
      if (r >= 0.0) {
        out[i] = r;
        return;
      }
    }
    throw InputError("bilinear_ratios: could not draw a nondegenerate pair");
  });
  return out;
}

Calibration Calibration::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open calibration file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("malformed calibration file " + path.string() + ": " + e.what());
  }
  Calibration c;
  for (const auto& e : doc.at("entries")) {
    CalibrationEntry entry;
    entry.side_length = e.at("grid").at("L").get<double>();
    entry.resolution = e.at("grid").at("N").get<int>();
    entry.horizon = e.at("T").get<double>();
    entry.pair = norm_pair_from_string(e.at("pair").get<std::string>());
    entry.eta = e.at("eta").get<double>();
    entry.median = e.value("median", 0.0);
    entry.samples = e.value("samples", 0);
    c.entries_.push_back(entry);
  }
  return c;
}

void Calibration::save(const std::filesystem::path& path) const {
  json entries = json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"grid", {{"L", e.side_length}, {"N", e.resolution}}},
                       {"T", e.horizon},
                       {"pair", to_string(e.pair)},
                       {"eta", e.eta},
                       {"median", e.median},
                       {"samples", e.samples}});
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write calibration file " + path.string());
  out << json{{"entries", entries}}.dump(2) << "\n";
}

std::optional<CalibrationEntry> Calibration::find(const Grid& grid, double horizon, NormPair pair) const {
  for (const auto& e : entries_) {
    if (e.pair == pair && e.resolution == grid.resolution() && std::abs(e.side_length - grid.side_length()) <= 1e-12 * grid.side_length() &&
        std::abs(e.horizon - horizon) <= 1e-12 * horizon) {
      return e;
    }
  }
  return std::nullopt;
}

void Calibration::upsert(const CalibrationEntry& entry) {
  for (auto& e : entries_) {
    if (e.pair == entry.pair && e.resolution == entry.resolution && e.side_length == entry.side_length && e.horizon == entry.horizon) {
      e = entry;
      return;
    }
  }
  entries_.push_back(entry);
}

std::filesystem::path calibration_path(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("NS_CALIBRATION"); env != nullptr && *env != '\0') return env;
  return fallback;
}

}  // namespace nsbmo::solver
