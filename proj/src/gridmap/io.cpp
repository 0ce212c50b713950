#include "tnav/gridmap/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "tnav/errors.hpp"
#include "tnav/io_util.hpp"

namespace tnav {

namespace {

using nlohmann::json;

std::string sidecar_path(const std::string& path) { return path + ".meta.json"; }

void write_sidecar(const std::string& path, const GridSpec& spec,
                   std::optional<double> z_scale, std::optional<double> z_offset) {
  json j;
  j["resolution"] = spec.resolution;
  j["origin"] = {spec.origin_x, spec.origin_y};
  j["rows"] = spec.rows;
  j["cols"] = spec.cols;
  if (z_scale) j["z_scale"] = *z_scale;
  if (z_offset) j["z_offset"] = *z_offset;
  std::ofstream out(sidecar_path(path), std::ios::trunc);
  if (!out) throw IoError("cannot write " + sidecar_path(path));
  out << j.dump(2) << "\n";
}

struct SidecarMeta {
  GridSpec spec;
  double z_scale = 1.0;
  double z_offset = 0.0;
};

std::optional<SidecarMeta> read_sidecar(const std::string& path) {
  std::ifstream in(sidecar_path(path));
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad sidecar " + sidecar_path(path) + ": " + e.what());
  }
  SidecarMeta meta;
  meta.spec.resolution = j.at("resolution").get<double>();
  meta.spec.origin_x = j.at("origin").at(0).get<double>();
  meta.spec.origin_y = j.at("origin").at(1).get<double>();
  if (j.contains("rows")) meta.spec.rows = j.at("rows").get<int>();
  if (j.contains("cols")) meta.spec.cols = j.at("cols").get<int>();
  if (j.contains("z_scale")) meta.z_scale = j.at("z_scale").get<double>();
  if (j.contains("z_offset")) meta.z_offset = j.at("z_offset").get<double>();
  return meta;
}

}  // namespace

void save_grid_csv(const std::string& path, const GridSpec& spec,
                   const std::vector<double>& values) {
  TNAV_REQUIRE(values.size() == spec.size(), "grid size mismatch");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  std::string line;
  for (int r = 0; r < spec.rows; ++r) {
    line.clear();
    for (int c = 0; c < spec.cols; ++c) {
      if (c > 0) line += ',';
      line += format_double(values[spec.index(r, c)]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("write failed: " + path);
  write_sidecar(path, spec, std::nullopt, std::nullopt);
}

void save_heightmap_csv(const std::string& path, const HeightMap& map) {
  save_grid_csv(path, map.spec, map.z);
}

HeightMap load_heightmap_csv(const std::string& path,
                             std::optional<GridSpec> fallback) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<double> values;
  int rows = 0;
  int cols = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (cols < 0)
      cols = static_cast<int>(fields.size());
    else if (static_cast<int>(fields.size()) != cols)
      throw IoError(path + ": ragged row " + format_int(rows));
    for (auto f : fields) values.push_back(parse_double(f));
    ++rows;
  }
  if (rows == 0) throw IoError(path + ": empty grid");

  HeightMap map;
  if (auto meta = read_sidecar(path)) {
    map.spec = meta->spec;
  } else if (fallback) {
    map.spec = *fallback;
  } else {
    map.spec.resolution = 0.1;
    map.spec.origin_x = 0.0;
    map.spec.origin_y = 0.0;
  }
  map.spec.rows = rows;
  map.spec.cols = cols;
  map.z = std::move(values);
  return map;
}

void save_heightmap_pgm(const std::string& path, const HeightMap& map) {
  double zmin = kNaN, zmax = kNaN;
  for (double v : map.z) {
    if (std::isnan(v)) continue;
    if (std::isnan(zmin) || v < zmin) zmin = v;
    if (std::isnan(zmax) || v > zmax) zmax = v;
  }
  if (std::isnan(zmin)) {
    zmin = 0.0;
    zmax = 0.0;
  }
  const double z_offset = zmin;
  const double z_scale = (zmax > zmin) ? (zmax - zmin) / 65534.0 : 1.0;

  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << map.spec.cols << " " << map.spec.rows << "\n65535\n";
  std::vector<unsigned char> buf;
  buf.reserve(map.spec.size() * 2);
  for (double v : map.z) {
    std::uint16_t q = 0;
    if (!std::isnan(v)) {
      const double t = std::nearbyint((v - z_offset) / z_scale);
      q = static_cast<std::uint16_t>(1.0 + clamp(t, 0.0, 65534.0));
    }
    buf.push_back(static_cast<unsigned char>(q >> 8));
    buf.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path);
  write_sidecar(path, map.spec, z_scale, z_offset);
}

HeightMap load_heightmap_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError(path + ": expected binary PGM (P5)");
  auto next_token = [&in, &path]() -> long long {
    // Skips whitespace and `#` comment lines between header tokens.
    for (;;) {
      int ch = in.peek();
      if (ch == '#') {
        std::string tmp;
        std::getline(in, tmp);
        continue;
      }
      if (std::isspace(ch)) {
        in.get();
        continue;
      }
      break;
    }
    long long v = 0;
    in >> v;
    if (!in) throw IoError(path + ": truncated PGM header");
    return v;
  };
  const long long cols = next_token();
  const long long rows = next_token();
  const long long maxval = next_token();
  if (maxval != 65535) throw IoError(path + ": expected 16-bit PGM");
  in.get();  // single whitespace after maxval

  const auto meta = read_sidecar(path);
  if (!meta) throw IoError(path + ": missing sidecar " + sidecar_path(path));

  HeightMap map;
  map.spec = meta->spec;
  map.spec.rows = static_cast<int>(rows);
  map.spec.cols = static_cast<int>(cols);
  map.z.assign(map.spec.size(), kNaN);
  std::vector<unsigned char> buf(map.spec.size() * 2);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw IoError(path + ": truncated PGM payload");
  for (std::size_t i = 0; i < map.spec.size(); ++i) {
    const std::uint16_t q =
        static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    if (q != 0) map.z[i] = meta->z_offset + (q - 1) * meta->z_scale;
  }
  return map;
}

std::vector<Eigen::Vector3d> load_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<Eigen::Vector3d> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z)) throw IoError(path + ": bad point line: " + line);
    pts.emplace_back(x, y, z);
  }
  return pts;
}

void save_xyz(const std::string& path, const std::vector<Eigen::Vector3d>& points) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& p : points) {
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z()) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace tnav
