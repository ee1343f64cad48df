#ifndef TONGUE_RENDER_HPP
#define TONGUE_RENDER_HPP

// Parameter-plane images: the tongue plane colored by attracting-cycle
// period, and the complex classification of the critical orbit. Output is
// a binary P6 pixmap plus a CSV legend, both fully determined by a
// RenderManifest.

#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tongue/complex_map.hpp"
#include "tongue/config.hpp"
#include "tongue/parallel.hpp"
#include "tongue/raster.hpp"
#include "tongue/tongue_atlas.hpp"

namespace tongue {

using Rgb = std::array<std::uint8_t, 3>;
using Palette = std::map<std::string, Rgb>;

enum class RenderMode { Tongues, ComplexClasses };

inline std::string to_string(RenderMode m) { return m == RenderMode::Tongues ? "tongues" : "complex_classes"; }

inline RenderMode parse_render_mode(const std::string& s) {
  if (s == "tongues") return RenderMode::Tongues;
  if (s == "complex_classes") return RenderMode::ComplexClasses;
  throw dynamics_error(ErrorKind::Precondition, "unknown render mode '" + s + "' (tongues | complex_classes)");
}

inline Palette default_tongue_palette() {
  return {
      {"period_1", {31, 119, 180}},  {"period_2", {255, 127, 14}}, {"period_3", {44, 160, 44}},
      {"period_4", {214, 39, 40}},   {"period_5", {148, 103, 189}}, {"period_6", {140, 86, 75}},
      {"period_7", {227, 119, 194}}, {"period_8", {188, 189, 34}},  {"period_high", {23, 190, 207}},
      {"NoAttractor", {255, 255, 255}}, {"Undecided", {128, 128, 128}},
  };
}

inline Palette default_complex_palette() {
  return {
      {"CircleAttracting", {0, 0, 255}}, {"EscapeZero", {255, 0, 0}}, {"EscapeInfinity", {0, 170, 0}},
      {"PairAttracting", {255, 165, 0}}, {"Undecided", {0, 0, 0}},
  };
}

inline Palette default_palette(RenderMode m) {
  return m == RenderMode::Tongues ? default_tongue_palette() : default_complex_palette();
}

inline Window default_window(RenderMode m) {
  if (m == RenderMode::Tongues) return Window{0.0, 1.0, 0.5, 1.0};
  return Window{-0.5, 0.5, 0.0, 2.0};
}

struct RenderManifest {
  Window window;
  int width = 512;
  int height = 256;
  RenderMode mode = RenderMode::Tongues;
  Palette palette;
  SolverConfig cfg;
  std::string tool_version{kToolVersion};

  static RenderManifest defaults(RenderMode m) {
    RenderManifest r;
    r.mode = m;
    r.window = default_window(m);
    r.palette = default_palette(m);
    return r;
  }

  void validate() const {
    if (width < 1 || height < 1) throw dynamics_error(ErrorKind::Precondition, "width and height must be >= 1");
    if (!window.valid()) throw dynamics_error(ErrorKind::Precondition, "render window is degenerate");
    cfg.validate();
  }
};

// JSON conversion. nlohmann::json objects keep keys sorted.

inline nlohmann::json to_json(const SolverConfig& c) {
  return {{"root_tol", c.root_tol},
          {"cycle_tol", c.cycle_tol},
          {"max_transient", c.max_transient},
          {"max_period", c.max_period},
          {"phi_depth", c.phi_depth},
          {"escape_log_threshold", c.escape_log_threshold},
          {"koenigs_depth", c.koenigs_depth},
          {"orbit_budget", c.orbit_budget},
          {"lyapunov_floor", c.lyapunov_floor},
          {"section_cells", c.section_cells},
          {"path_step", c.path_step}};
}

inline SolverConfig config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  auto take = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("root_tol", c.root_tol);
  take("cycle_tol", c.cycle_tol);
  take("max_transient", c.max_transient);
  take("max_period", c.max_period);
  take("phi_depth", c.phi_depth);
  take("escape_log_threshold", c.escape_log_threshold);
  take("koenigs_depth", c.koenigs_depth);
  take("orbit_budget", c.orbit_budget);
  take("lyapunov_floor", c.lyapunov_floor);
  take("section_cells", c.section_cells);
  take("path_step", c.path_step);
  c.validate();
  return c;
}

inline nlohmann::json to_json(const Window& w) {
  return {{"a_min", w.a_min}, {"a_max", w.a_max}, {"b_min", w.b_min}, {"b_max", w.b_max}};
}

inline nlohmann::json to_json(const RenderManifest& m) {
  nlohmann::json palette = nlohmann::json::object();
  for (const auto& [name, rgb] : m.palette) palette[name] = {rgb[0], rgb[1], rgb[2]};
  return {{"window", to_json(m.window)}, {"width", m.width},           {"height", m.height},
          {"mode", to_string(m.mode)},   {"palette", palette},         {"cfg", to_json(m.cfg)},
          {"tool_version", m.tool_version}};
}

/// Missing palette entries fall back to the mode's defaults; missing cfg
/// fields to SolverConfig's.
inline RenderManifest manifest_from_json(const nlohmann::json& j) {
  try {
    RenderManifest m = RenderManifest::defaults(parse_render_mode(j.at("mode").get<std::string>()));
    if (j.contains("window")) {
      const auto& w = j.at("window");
      m.window = Window{w.at("a_min").get<double>(), w.at("a_max").get<double>(), w.at("b_min").get<double>(),
                        w.at("b_max").get<double>()};
    }
    if (j.contains("width")) m.width = j.at("width").get<int>();
    if (j.contains("height")) m.height = j.at("height").get<int>();
    if (j.contains("palette")) {
      for (const auto& [name, rgb] : j.at("palette").items()) {
        m.palette[name] = Rgb{rgb.at(0).get<std::uint8_t>(), rgb.at(1).get<std::uint8_t>(), rgb.at(2).get<std::uint8_t>()};
      }
    }
    if (j.contains("cfg")) m.cfg = config_from_json(j.at("cfg"));
    if (j.contains("tool_version")) m.tool_version = j.at("tool_version").get<std::string>();
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw dynamics_error(ErrorKind::Precondition, std::string("malformed manifest: ") + e.what());
  }
}

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Rgb pixel(int row, int col) const {
    const auto i = 3 * (static_cast<std::size_t>(row) * width + col);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
};

struct LegendRow {
  std::string label;
  Rgb color;
  long pixels;
};

struct Rendering {
  Image image;
  std::vector<LegendRow> legend;
};

inline void write_ppm(std::ostream& out, const Image& img) {
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

inline std::string hex_color(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c[0], c[1], c[2]);
  return buf;
}

inline void write_legend_csv(std::ostream& out, const std::vector<LegendRow>& rows) {
  out << "type,color,pixels\n";
  for (const LegendRow& r : rows) out << r.label << ',' << hex_color(r.color) << ',' << r.pixels << '\n';
}

namespace detail {

inline Rgb palette_color(const Palette& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw dynamics_error(ErrorKind::Precondition, "palette has no entry '" + key + "'");
  return it->second;
}

inline constexpr std::uint8_t kClassCircle = 0;
inline constexpr std::uint8_t kClassUndecided = 4;
static_assert(std::is_same_v<std::variant_alternative_t<kClassCircle, OrbitClass>, CircleAttracting>);
static_assert(std::is_same_v<std::variant_alternative_t<kClassUndecided, OrbitClass>, Undecided>);

inline std::string period_key(int period) {
  return period <= 8 ? "period_" + std::to_string(period) : std::string("period_high");
}

}  // namespace detail

/// Orbit-class index (OrbitClass::index()) of the inner critical orbit at
/// every cell center of the grid.
inline std::vector<std::uint8_t> complex_classes(const Grid& grid, const SolverConfig& cfg, unsigned threads) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(grid.width) * grid.height);
  parallel_for(grid.height, threads, [&](int row) {
    const double b = grid.b_at(row);
    for (int col = 0; col < grid.width; ++col) {
      std::uint8_t cls = detail::kClassUndecided;
      if (b > 0.0) {
        try {
          cls = static_cast<std::uint8_t>(classify_critical_orbit(ComplexParams{grid.a_at(col), b}, cfg).index());
        } catch (const dynamics_error&) {
        }
      }
      out[static_cast<std::size_t>(row) * grid.width + col] = cls;
    }
  });
  return out;
}

/// Tongue-plane image from an already computed raster.
inline Rendering render_tongue_raster(const TongueRaster& raster, const Palette& palette) {
  const Grid& g = raster.grid;
  Rendering r;
  r.image = Image{g.width, g.height, std::vector<std::uint8_t>(raster.cells.size() * 3)};
  std::map<BinaryType, long> per_type;
  long none = 0, undecided = 0;
  for (std::size_t i = 0; i < raster.cells.size(); ++i) {
    const TongueCell& c = raster.cells[i];
    Rgb color;
    switch (c.kind) {
      case CellKind::InTongue:
        color = detail::palette_color(palette, detail::period_key(c.type.period()));
        ++per_type[c.type];
        break;
      case CellKind::Undecided:
        color = detail::palette_color(palette, "Undecided");
        ++undecided;
        break;
      default:
        color = detail::palette_color(palette, "NoAttractor");
        ++none;
    }
    std::copy(color.begin(), color.end(), r.image.rgb.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  for (const auto& [type, count] : per_type) {
    r.legend.push_back({type.to_string(), detail::palette_color(palette, detail::period_key(type.period())), count});
  }
  r.legend.push_back({"NoAttractor", detail::palette_color(palette, "NoAttractor"), none});
  r.legend.push_back({"Undecided", detail::palette_color(palette, "Undecided"), undecided});
  return r;
}

inline Rendering render_tongue_plane(const RenderManifest& m, unsigned threads = worker_count()) {
  m.validate();
  if (m.mode != RenderMode::Tongues) throw dynamics_error(ErrorKind::Precondition, "manifest mode is not tongues");
  return render_tongue_raster(rasterize_tongues(Grid{m.window, m.width, m.height}, m.cfg, threads), m.palette);
}

inline Rendering render_complex_classes(const Grid& grid, const std::vector<std::uint8_t>& classes,
                                        const Palette& palette) {
  static constexpr const char* kNames[] = {"CircleAttracting", "PairAttracting", "EscapeZero", "EscapeInfinity",
                                           "Undecided"};
  Rendering r;
  r.image = Image{grid.width, grid.height, std::vector<std::uint8_t>(classes.size() * 3)};
  std::array<long, 5> counts{};
  std::array<Rgb, 5> colors;
  for (std::size_t k = 0; k < 5; ++k) colors[k] = detail::palette_color(palette, kNames[k]);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    ++counts[classes[i]];
    std::copy(colors[classes[i]].begin(), colors[classes[i]].end(), r.image.rgb.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  for (std::size_t k = 0; k < 5; ++k) r.legend.push_back({kNames[k], colors[k], counts[k]});
  return r;
}

inline Rendering render_complex_plane(const RenderManifest& m, unsigned threads = worker_count()) {
  m.validate();
  if (m.mode != RenderMode::ComplexClasses) {
    throw dynamics_error(ErrorKind::Precondition, "manifest mode is not complex_classes");
  }
  const Grid grid{m.window, m.width, m.height};
  return render_complex_classes(grid, complex_classes(grid, m.cfg, threads), m.palette);
}

inline Rendering render(const RenderManifest& m, unsigned threads = worker_count()) {
  return m.mode == RenderMode::Tongues ? render_tongue_plane(m, threads) : render_complex_plane(m, threads);
}

struct PlaneAgreement {
  long compared = 0;
  long agreeing = 0;
  double fraction() const { return compared == 0 ? 1.0 : static_cast<double>(agreeing) / compared; }
};

/// Cell-wise agreement of "in some tongue" with "critical orbit attracted to
/// a circle cycle", skipping cells undecided on either side.
inline PlaneAgreement compare_planes(const TongueRaster& tongues, const std::vector<std::uint8_t>& classes) {
  using detail::kClassCircle;
  using detail::kClassUndecided;
  PlaneAgreement out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const TongueCell& t = tongues.cells[i];
    if (t.kind == CellKind::Undecided || classes[i] == kClassUndecided) continue;
    ++out.compared;
    if ((t.kind == CellKind::InTongue) == (classes[i] == kClassCircle)) ++out.agreeing;
  }
  return out;
}

}  // namespace tongue

#endif  // TONGUE_RENDER_HPP
