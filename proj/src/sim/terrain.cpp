#include <cmath>
#include <cstdint>
#include <cstdio>
#include <utility>

#include "tnav/errors.hpp"
#include "tnav/rng.hpp"
#include "tnav/sim/sim.hpp"

namespace tnav {

namespace {

// Seeded lattice value in [-1, 1); two mix rounds decorrelate the axes.
double lattice_value(std::uint64_t seed, std::int64_t xi, std::int64_t yi) {
  const std::uint64_t h =
      mix64(mix64(seed ^ static_cast<std::uint64_t>(xi)) ^
            static_cast<std::uint64_t>(yi));
  return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const std::int64_t xi = static_cast<std::int64_t>(fx);
  const std::int64_t yi = static_cast<std::int64_t>(fy);
  const double tx = fade(x - fx), ty = fade(y - fy);
  const double v00 = lattice_value(seed, xi, yi);
  const double v10 = lattice_value(seed, xi + 1, yi);
  const double v01 = lattice_value(seed, xi, yi + 1);
  const double v11 = lattice_value(seed, xi + 1, yi + 1);
  const double a = v00 + (v10 - v00) * tx;
  const double b = v01 + (v11 - v01) * tx;
  return a + (b - a) * ty;
}

// Octave sum normalized back to [-1, 1].
double fractal_noise(std::uint64_t seed, double x, double y, int octaves,
                     double wavelength) {
  double sum = 0.0, amp = 1.0, norm = 0.0;
  double freq = 1.0 / wavelength;
  for (int o = 0; o < octaves; ++o) {
    sum += amp * value_noise(mix64(seed + static_cast<std::uint64_t>(o)),
                             x * freq, y * freq);
    norm += amp;
    amp *= 0.5;
    freq *= 2.0;
  }
  return sum / norm;
}

double sill_height_at(const SillSpec& s, double x, double y) {
  if (std::fabs(x - s.x_center) > 0.5 * s.width) return 0.0;
  double gate = 1.0;
  if (s.gap_half_width > 0.0) {
    const double dy = std::fabs(y - s.gap_center);
    if (dy <= s.gap_half_width) return 0.0;
    // Linear shoulder over half a meter just outside the gap.
    gate = clamp((dy - s.gap_half_width) / 0.5, 0.0, 1.0);
  }
  return s.height * gate;
}

double ditch_depth_at(const DitchSpec& d, double x) {
  const double u = 2.0 * (x - d.x_center) / d.width;
  return std::fabs(u) < 1.0 ? d.depth * (1.0 - u * u) : 0.0;
}

// 0.1 mm quantization pins the export hash against libm variation.
double quantize(double z) { return std::nearbyint(z * 1e4) * 1e-4; }

struct Rock {
  double x, y, radius, height;
};

}  // namespace

void TerrainSpec::validate() const {
  if (id.empty()) throw ConfigError("terrain id must be non-empty");
  if (octaves < 1 || octaves > 12)
    throw ConfigError("terrain octaves out of range [1, 12]");
  if (!(amplitude >= 0.0)) throw ConfigError("terrain amplitude must be >= 0");
  if (!(wavelength > 0.0)) throw ConfigError("terrain wavelength must be > 0");
  if (!(extent_x > 0.0) || !(extent_y > 0.0))
    throw ConfigError("terrain extent must be positive");
  if (!(resolution > 0.0)) throw ConfigError("terrain resolution must be > 0");
  for (const auto& s : sills)
    if (!(s.width > 0.0) || !(s.height >= 0.0) || s.gap_half_width < 0.0)
      throw ConfigError("sill needs positive width and non-negative height");
  if (rocks.density < 0.0 || !(rocks.radius > 0.0) || rocks.height < 0.0)
    throw ConfigError("rock spec needs density/height >= 0 and radius > 0");
  for (const auto& d : ditches)
    if (!(d.width > 0.0) || d.depth < 0.0)
      throw ConfigError("ditch needs positive width and non-negative depth");
  if (pillars.count < 0 || !(pillars.radius > 0.0))
    throw ConfigError("pillar spec needs count >= 0 and radius > 0");
}

Terrain generate_terrain(const TerrainSpec& spec,
                         const TraversabilityParams& tp) {
  spec.validate();
  tp.validate();

  GridSpec gs;
  gs.resolution = spec.resolution;
  gs.cols = static_cast<int>(std::lround(spec.extent_x / spec.resolution));
  gs.rows = static_cast<int>(std::lround(spec.extent_y / spec.resolution));
  gs.origin_x = 0.0;
  gs.origin_y = 0.0;
  TNAV_REQUIRE(gs.rows > 0 && gs.cols > 0, "terrain grid is empty");

  std::vector<Rock> rocks;
  const int n_rocks = static_cast<int>(
      std::lround(spec.rocks.density * spec.extent_x * spec.extent_y));
  Rng rock_rng(hash_combine(spec.seed, hash64("rocks")));
  for (int k = 0; k < n_rocks; ++k) {
    Rock r;
    r.x = rock_rng.uniform(0.0, spec.extent_x);
    r.y = rock_rng.uniform(0.0, spec.extent_y);
    r.radius = spec.rocks.radius * (0.6 + 0.8 * rock_rng.uniform01());
    r.height = spec.rocks.height * (0.5 + 1.0 * rock_rng.uniform01());
    rocks.push_back(r);
  }

  // Posts stay in the central band so route endpoints keep clear margins.
  std::vector<Pillar> pillars;
  Rng pillar_rng(hash_combine(spec.seed, hash64("pillars")));
  for (int k = 0; k < spec.pillars.count; ++k) {
    Pillar p;
    p.x = spec.extent_x * (0.3 + 0.4 * pillar_rng.uniform01());
    p.y = spec.extent_y * (0.15 + 0.7 * pillar_rng.uniform01());
    p.radius = spec.pillars.radius;
    pillars.push_back(p);
  }

  const double grade = std::tan(spec.inclination_deg * kPi / 180.0);
  HeightMap hm;
  hm.reset(gs);
  for (int r = 0; r < gs.rows; ++r) {
    for (int c = 0; c < gs.cols; ++c) {
      const double x = gs.center_x(c);
      const double y = gs.center_y(r);
      bool vacant = false;
      for (const auto& p : pillars) {
        const double dx = x - p.x, dy = y - p.y;
        if (dx * dx + dy * dy <= p.radius * p.radius) {
          vacant = true;
          break;
        }
      }
      if (vacant) continue;  // stays NaN
      double z = spec.amplitude *
                 fractal_noise(spec.seed, x, y, spec.octaves, spec.wavelength);
      z += grade * x;
      for (const auto& s : spec.sills) z += sill_height_at(s, x, y);
      for (const auto& d : spec.ditches) z -= ditch_depth_at(d, x);
      for (const auto& rk : rocks) {
        const double dx = x - rk.x, dy = y - rk.y;
        const double d2 = dx * dx + dy * dy;
        const double r2 = rk.radius * rk.radius;
        if (d2 < r2) z += rk.height * (1.0 - d2 / r2);
      }
      hm.at(r, c) = quantize(z);
    }
  }

  Terrain t;
  t.id = spec.id;
  t.maps = build_maps(hm, tp);
  t.obstacles = std::move(pillars);
  t.inclination_deg = spec.inclination_deg;
  t.seed = spec.seed;
  return t;
}

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kPlain: return "plain";
    case Difficulty::kHard: return "hard";
  }
  return "?";
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "easy") return Difficulty::kEasy;
  if (s == "plain") return Difficulty::kPlain;
  if (s == "hard") return Difficulty::kHard;
  throw ConfigError("unknown difficulty level: " + s);
}

void DifficultyCuts::validate() const {
  if (!(easy_below > 0.0) || !(easy_below < plain_below) || !(plain_below < 1.0))
    throw ConfigError("difficulty cuts must satisfy 0 < easy < plain < 1");
}

double terrain_mean_tau(const Terrain& t) {
  const auto& hm = t.maps.height;
  const auto& tau = t.maps.trav.tau;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (std::isnan(hm.z[i])) continue;
    sum += tau[i];
    ++n;
  }
  return n == 0 ? 1.0 : sum / static_cast<double>(n);
}

Difficulty difficulty_level(const Terrain& t, const DifficultyCuts& cuts) {
  cuts.validate();
  const double mt = terrain_mean_tau(t);
  if (mt < cuts.easy_below) return Difficulty::kEasy;
  if (mt < cuts.plain_below) return Difficulty::kPlain;
  return Difficulty::kHard;
}

TerrainSpec sill_scenario_spec(double sill_height) {
  TerrainSpec spec;
  spec.id = "sill_crossing";
  spec.octaves = 1;
  spec.amplitude = 0.0;  // flat apart from the sill: the rule is the terrain
  spec.wavelength = 3.0;
  spec.extent_x = 12.0;
  spec.extent_y = 8.0;
  spec.seed = 7;
  SillSpec sill;
  sill.x_center = 6.0;
  sill.height = sill_height;
  sill.width = 0.4;
  spec.sills.push_back(sill);
  return spec;
}

std::vector<TerrainSpec> benchmark_suite() {
  std::vector<TerrainSpec> out;
  out.reserve(27);
  auto base = [](int idx) {
    TerrainSpec s;
    char id[8];
    std::snprintf(id, sizeof(id), "t%02d", idx);
    s.id = id;
    s.extent_x = 18.0;
    s.extent_y = 12.0;
    s.seed = 1000 + static_cast<std::uint64_t>(idx);
    return s;
  };

  // Gentle group: rolling ground, no built features.
  for (int i = 1; i <= 9; ++i) {
    TerrainSpec s = base(i);
    s.octaves = 2;
    s.amplitude = 0.02 + 0.004 * (i - 1);
    s.wavelength = 6.0 - 0.25 * (i - 1);
    out.push_back(s);
  }
  // Medium group: shorter relief plus sparse rocks; later entries add a
  // shallow ditch or a low gapped sill.
  for (int i = 10; i <= 18; ++i) {
    TerrainSpec s = base(i);
    const int j = i - 10;
    s.octaves = 3;
    s.amplitude = 0.08 + 0.006 * j;
    s.wavelength = 4.0 - 0.2 * j;
    s.rocks = {0.04 + 0.01 * j, 0.25, 0.12};
    if (j >= 3 && j % 2 == 1) s.ditches.push_back({7.0 + 0.5 * j, 0.12, 1.6});
    if (j >= 4 && j % 2 == 0)
      s.sills.push_back({9.0 + 0.4 * j, 0.10, 0.5, 6.0 - 0.4 * j, 1.2});
    out.push_back(s);
  }
  // Rough group: steep short relief, dense rocks, gapped sills, deeper
  // ditches; a couple of specs add posts.
  for (int i = 19; i <= 27; ++i) {
    TerrainSpec s = base(i);
    const int j = i - 19;
    s.octaves = 4;
    s.amplitude = 0.16 + 0.01 * j;
    s.wavelength = 3.0 - 0.12 * j;
    s.rocks = {0.12 + 0.015 * j, 0.3, 0.16 + 0.01 * j};
    s.sills.push_back({8.0 + 0.3 * j, 0.15 + 0.006 * j, 0.5, 6.0 - 0.35 * j, 1.1});
    if (j % 2 == 0) s.ditches.push_back({12.5 + 0.25 * j, 0.16 + 0.01 * j, 1.8});
    if (j % 3 == 2) s.pillars = {2, 0.3};
    out.push_back(s);
  }
  return out;
}

std::vector<TerrainSpec> expand_inclinations(
    const std::vector<TerrainSpec>& base) {
  static constexpr double kDegrees[] = {0.0, 5.0, 10.0, 15.0};
  std::vector<TerrainSpec> out;
  out.reserve(base.size() * 4);
  for (const auto& b : base) {
    for (double deg : kDegrees) {
      TerrainSpec s = b;
      s.inclination_deg = deg;
      s.id = b.id + "_i" + std::to_string(static_cast<int>(deg));
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace tnav
