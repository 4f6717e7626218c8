#include "nsbmo/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nsbmo::io {

namespace {

using json = nlohmann::json;
constexpr std::array<char, 4> kMagic{'N', 'S', 'B', 'F'};

template <class T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw FormatError("field container truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto s = path;
  s += ".json";
  return s;
}

struct Header {
  double side_length;
  int resolution;
  int components;
};

Header read_header(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) throw FormatError("not a field container (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kFieldFormatVersion) throw FormatError("unsupported field container version " + std::to_string(version));
  Header h{};
  h.side_length = get<double>(in);
  h.resolution = static_cast<int>(get<std::uint32_t>(in));
  h.components = static_cast<int>(get<std::uint32_t>(in));
  return h;
}

std::string slice_name(std::size_t m) {
  std::ostringstream name;
  name << "slice_" << std::setw(5) << std::setfill('0') << m << ".nsbf";
  return name.str();
}

}  // namespace

template <int C>
void write_field(const Field<C>& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), 4);
  put<std::uint32_t>(out, kFieldFormatVersion);
  put<double>(out, f.grid().side_length());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().resolution()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(C));
  for (int c = 0; c < C; ++c) {
    for (const auto& z : f.component(c)) {
      put<double>(out, z.real());
      put<double>(out, z.imag());
    }
  }
  if (!out) throw FormatError("write failed for " + path.string());

  json meta{{"format", "nsbmo-field"},
            {"version", kFieldFormatVersion},
            {"side_length", f.grid().side_length()},
            {"resolution", f.grid().resolution()},
            {"components", C},
            {"divergence_free", f.divergence_free()},
            {"mean_zero", f.mean_zero()},
            {"layout", "component-major; row-major over (ky, kx) in FFT index order"}};
  std::ofstream side(sidecar(path));
  side << meta.dump(2) << '\n';
}

template <int C>
Field<C> read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const Header h = read_header(in);
  if (h.components != C) {
    throw FormatError(path.string() + ": expected " + std::to_string(C) + " components, found " +
                      std::to_string(h.components));
  }
  Field<C> f(Grid(h.side_length, h.resolution));
  for (int c = 0; c < C; ++c) {
    for (auto& z : f.component(c)) {
      const double re = get<double>(in);
      const double im = get<double>(in);
      z = Complex(re, im);
    }
  }
  std::ifstream side(sidecar(path));
  if (side) {
    const json meta = json::parse(side);
    f.set_divergence_free(meta.value("divergence_free", false));
    f.set_mean_zero(meta.value("mean_zero", false));
  }
  return f;
}

int peek_components(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_header(in).components;
}

template <int C>
void write_trajectory(const Trajectory<C>& traj, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  json index{{"format", "nsbmo-trajectory"}, {"version", kFieldFormatVersion}, {"components", C}};
  json files = json::array();
  for (std::size_t m = 0; m < traj.size(); ++m) {
    const std::string name = slice_name(m);
    write_field(traj.slice(m), directory / name);
    files.push_back(name);
  }
  index["times"] = traj.times();
  index["files"] = files;
  std::ofstream out(directory / "index.json");
  out << std::setprecision(17) << index.dump(2) << '\n';
}

template <int C>
Trajectory<C> read_trajectory(const std::filesystem::path& directory) {
  std::ifstream in(directory / "index.json");
  if (!in) throw FormatError("missing index.json in " + directory.string());
  const json index = json::parse(in);
  if (index.at("components").get<int>() != C) throw FormatError("trajectory component count mismatch");
  auto times = index.at("times").get<std::vector<double>>();
  std::vector<Field<C>> slices;
  for (const auto& name : index.at("files")) slices.push_back(read_field<C>(directory / name.get<std::string>()));
  return Trajectory<C>(std::move(times), std::move(slices));
}

template void write_field<1>(const Field<1>&, const std::filesystem::path&);
template void write_field<2>(const Field<2>&, const std::filesystem::path&);
template void write_field<4>(const Field<4>&, const std::filesystem::path&);
template Field<1> read_field<1>(const std::filesystem::path&);
template Field<2> read_field<2>(const std::filesystem::path&);
template Field<4> read_field<4>(const std::filesystem::path&);
template void write_trajectory<1>(const Trajectory<1>&, const std::filesystem::path&);
template void write_trajectory<2>(const Trajectory<2>&, const std::filesystem::path&);
template void write_trajectory<4>(const Trajectory<4>&, const std::filesystem::path&);
template Trajectory<1> read_trajectory<1>(const std::filesystem::path&);
template Trajectory<2> read_trajectory<2>(const std::filesystem::path&);
template Trajectory<4> read_trajectory<4>(const std::filesystem::path&);

}  // namespace nsbmo::io
