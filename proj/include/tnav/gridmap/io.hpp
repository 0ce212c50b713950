#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "tnav/gridmap/grid.hpp"

namespace tnav {

// CSV grid: one row per grid row, comma separated, `nan` for vacant cells.
// Doubles are written in shortest round-trip form, so save -> load -> save
// reproduces the file byte for byte. A JSON sidecar `<path>.meta.json`
// carries the grid geometry; loading falls back to `fallback` when the
// sidecar is missing.
void save_grid_csv(const std::string& path, const GridSpec& spec,
                   const std::vector<double>& values);
void save_heightmap_csv(const std::string& path, const HeightMap& map);
HeightMap load_heightmap_csv(const std::string& path,
                             std::optional<GridSpec> fallback = std::nullopt);

// 16-bit binary PGM (P5, maxval 65535, big-endian), value 0 = vacant,
// v in [1, 65535] maps to z = z_offset + (v - 1) * z_scale. The sidecar
// `<path>.meta.json` stores resolution, origin, z_scale and z_offset.
void save_heightmap_pgm(const std::string& path, const HeightMap& map);
HeightMap load_heightmap_pgm(const std::string& path);

// Plain text point cloud, one `x y z` triple per line.
std::vector<Eigen::Vector3d> load_xyz(const std::string& path);
void save_xyz(const std::string& path, const std::vector<Eigen::Vector3d>& points);

}  // namespace tnav
