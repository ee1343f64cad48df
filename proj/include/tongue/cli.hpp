#ifndef TONGUE_CLI_HPP
#define TONGUE_CLI_HPP

// The tongue-atlas command line. run_cli() holds all the logic so that tests
// can drive it with string streams; tools/tongue_atlas.cpp only forwards
// argv and the standard streams.
//
// Exit codes: 0 success, 1 domain or I/O failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tongue/config.hpp"
#include "tongue/linearization.hpp"
#include "tongue/render.hpp"
#include "tongue/tongue_atlas.hpp"

namespace tongue {

namespace cli_detail {

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline BinaryType parse_type(const std::string& text) {
  try {
    return BinaryType::parse(text);
  } catch (const dynamics_error& e) {
    throw UsageError(e.what());
  }
}

inline nlohmann::json cycle_json(const Cycle& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (int i = 0; i < c.period; ++i) pts.push_back(c.point(i).value);
  nlohmann::json j{{"period", c.period}, {"points", pts}, {"multiplier", c.multiplier}, {"shift", c.shift}};
  j["distinguished_index"] = c.distinguished_index ? nlohmann::json(*c.distinguished_index) : nlohmann::json();
  return j;
}

inline nlohmann::json sample_json(const TongueSample& s) {
  nlohmann::json j{{"a", s.params.a}, {"b", s.params.b}};
  if (const InTongue* hit = s.in_tongue()) {
    j["outcome"] = "InTongue";
    j["type"] = hit->type.to_string();
    j["period"] = hit->cycle.period;
    j["multiplier"] = hit->cycle.multiplier;
    j["cycle"] = cycle_json(hit->cycle);
  } else if (std::holds_alternative<Undecided>(s.outcome)) {
    j["outcome"] = "Undecided";
  } else {
    j["outcome"] = "NoAttractor";
  }
  return j;
}

// Destination for a command's main output plus its run manifest.
class Sink {
 public:
  Sink(std::optional<std::string> path, std::ostream& out, std::ostream& err) : path_(std::move(path)), out_(out), err_(err) {}

  void write(const std::string& text) const {
    if (!path_) {
      out_ << text;
      return;
    }
    write_file(*path_, text);
  }

  void manifest(const nlohmann::json& j) const {
    const std::string text = j.dump(2) + "\n";
    if (path_) {
      write_file(*path_ + ".manifest.json", text);
    } else {
      err_ << text;
    }
  }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write to " + path + " failed");
  }

 private:
  std::optional<std::string> path_;
  std::ostream& out_;
  std::ostream& err_;
};

inline nlohmann::json run_manifest(const std::string& command, const nlohmann::json& inputs, const SolverConfig& cfg) {
  return {{"command", command}, {"inputs", inputs}, {"cfg", to_json(cfg)}, {"tool_version", std::string(kToolVersion)}};
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Arnold tongues of the double standard map: atlas, classification, sections, rendering", "tongue-atlas"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::optional<std::string> out_path;
  std::string cfg_path;
  app.add_option("--config", cfg_path, "JSON file overriding solver settings");

  auto out_option = [&](CLI::App* sub) { sub->add_option("--out", out_path, "write output to this file instead of stdout"); };

  std::function<void(const SolverConfig&, const Sink&)> action;

  // atlas
  int period = 0;
  auto* atlas = app.add_subcommand("atlas", "superattracting parameters (a_tau, 1) for one period");
  atlas->add_option("--period", period, "period p; lists the 2^p - 1 parameters")->required()->check(CLI::Range(1, 30));
  out_option(atlas);
  atlas->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      std::ostringstream csv;
      csv << "type,a_super\n";
      for (const AtlasEntry& e : superattracting_atlas(period, cfg)) csv << e.type.to_string() << ',' << num(e.a_super.value) << '\n';
      sink.write(csv.str());
      sink.manifest(run_manifest("atlas", {{"period", period}}, cfg));
    };
  });

  // classify
  double a = 0, b = 0;
  auto* classify = app.add_subcommand("classify", "tongue membership and type of one parameter");
  classify->add_option("--a", a, "rotation parameter a")->required();
  classify->add_option("--b", b, "amplitude b in [0,1]")->required()->check(CLI::Range(0.0, 1.0));
  out_option(classify);
  classify->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      sink.write(sample_json(classify_param(CircleParams{a, b}, cfg)).dump(2) + "\n");
      sink.manifest(run_manifest("classify", {{"a", a}, {"b", b}}, cfg));
    };
  });

  // section
  std::string type_text;
  auto* section = app.add_subcommand("section", "a-intervals of one tongue at height b");
  section->add_option("--type", type_text, "type K/D with D odd, e.g. 1/3")->required();
  section->add_option("--b", b, "height b in [0,1]")->required()->check(CLI::Range(0.0, 1.0));
  out_option(section);
  section->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      const BinaryType t = parse_type(type_text);
      std::ostringstream csv;
      csv << "lo,hi,width\n";
      for (const Interval& iv : cross_section(t, b, cfg)) csv << num(iv.lo) << ',' << num(iv.hi) << ',' << num(iv.width()) << '\n';
      sink.write(csv.str());
      sink.manifest(run_manifest("section", {{"type", t.to_string()}, {"b", b}}, cfg));
    };
  });

  // tip
  auto* tip = app.add_subcommand("tip", "lowest b of a tongue");
  tip->add_option("--type", type_text, "type K/D")->required();
  out_option(tip);
  tip->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      const BinaryType t = parse_type(type_text);
      nlohmann::json j{{"type", t.to_string()}, {"b_tip", tongue_tip(t, cfg)}};
      if (auto c = tongue_cusp(t, cfg)) {
        j["cusp"] = {{"a", c->a}, {"b", c->b}};
      } else {
        j["cusp"] = nullptr;
      }
      sink.write(j.dump(2) + "\n");
      sink.manifest(run_manifest("tip", {{"type", t.to_string()}}, cfg));
    };
  });

  // connect
  int width = 1024, height = 512;
  Window window = default_window(RenderMode::Tongues);
  auto* connect = app.add_subcommand("connect", "raster connectivity check of one tongue");
  connect->add_option("--type", type_text, "type K/D")->required();
  connect->add_option("--width", width, "raster columns")->capture_default_str();
  connect->add_option("--height", height, "raster rows")->capture_default_str();
  connect->add_option("--a-min", window.a_min)->capture_default_str();
  connect->add_option("--a-max", window.a_max)->capture_default_str();
  connect->add_option("--b-min", window.b_min)->capture_default_str();
  connect->add_option("--b-max", window.b_max)->capture_default_str();
  out_option(connect);
  connect->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      const BinaryType t = parse_type(type_text);
      if (!window.valid()) throw UsageError("window is degenerate");
      const ConnectivityReport r = connectivity_check(t, window, width, height, cfg);
      nlohmann::json j{{"type", t.to_string()},
                       {"status", r.pass ? "PASS" : "FAIL"},
                       {"resolution_ok", r.resolution_ok},
                       {"components", r.components},
                       {"center_components", r.center_components},
                       {"anchor_in_component", r.anchor_in_component},
                       {"member_pixels", r.member_pixels},
                       {"traced_cells", r.traced_cells},
                       {"undecided_fraction", r.undecided_fraction},
                       {"a_anchor", r.a_anchor}};
      if (!r.resolution_ok) j["note"] = "resolution below 64x64";
      sink.write(j.dump(2) + "\n");
      sink.manifest(run_manifest("connect", {{"type", t.to_string()}, {"width", width}, {"height", height}, {"window", to_json(window)}}, cfg));
    };
  });

  // path
  auto* path = app.add_subcommand("path", "in-tongue path from (a, b) to the superattracting parameter");
  path->add_option("--type", type_text, "type K/D")->required();
  path->add_option("--a", a, "start a")->required();
  path->add_option("--b", b, "start b")->required()->check(CLI::Range(0.0, 1.0));
  out_option(path);
  path->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      const BinaryType t = parse_type(type_text);
      const TonguePath p = path_to_superattracting(t, CircleParams{a, b}, cfg);
      std::ostringstream csv;
      csv << "a,b,multiplier,violation\n";
      for (const PathVertex& v : p.vertices) csv << num(v.a) << ',' << num(v.b) << ',' << num(v.multiplier) << ',' << (v.violation ? 1 : 0) << '\n';
      sink.write(csv.str());
      sink.manifest(run_manifest("path", {{"type", t.to_string()}, {"a", a}, {"b", b}, {"violations", p.violations}}, cfg));
    };
  });

  // render
  std::string mode_text, manifest_path;
  std::optional<int> r_width, r_height;
  auto* rend = app.add_subcommand("render", "P6 image and legend of the tongue or complex parameter plane");
  rend->add_option("--mode", mode_text, "tongues | complex_classes");
  rend->add_option("--manifest", manifest_path, "RenderManifest JSON; a previous run's sidecar reproduces it");
  rend->add_option("--width", r_width, "override the image width");
  rend->add_option("--height", r_height, "override the image height");
  rend->add_option("--out", out_path, "image path; the legend goes to OUT.legend.csv")->required();
  rend->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      RenderManifest m;
      if (!manifest_path.empty()) {
        std::ifstream f(manifest_path);
        if (!f) throw std::runtime_error("cannot open " + manifest_path);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(f);
        } catch (const nlohmann::json::exception& e) {
          throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
        }
        try {
          m = manifest_from_json(j);
        } catch (const dynamics_error& e) {
          throw UsageError(e.what());
        }
        if (!mode_text.empty() && to_string(m.mode) != mode_text) throw UsageError("--mode disagrees with the manifest");
      } else {
        if (mode_text.empty()) throw UsageError("render needs --mode or --manifest");
        try {
          m = RenderManifest::defaults(parse_render_mode(mode_text));
        } catch (const dynamics_error& e) {
          throw UsageError(e.what());
        }
        m.cfg = cfg;
      }
      if (r_width) m.width = *r_width;
      if (r_height) m.height = *r_height;
      m.validate();
      const Rendering r = render(m);
      std::ostringstream img, legend;
      write_ppm(img, r.image);
      write_legend_csv(legend, r.legend);
      sink.write(img.str());
      Sink::write_file(*out_path + ".legend.csv", legend.str());
      sink.manifest(to_json(m));
    };
  });

  // koenigs-check
  auto* kc = app.add_subcommand("koenigs-check", "Koenigs chart residuals at an attracting cycle");
  kc->add_option("--a", a, "rotation parameter a")->required();
  kc->add_option("--b", b, "amplitude b in [0,1]")->required()->check(CLI::Range(0.0, 1.0));
  out_option(kc);
  kc->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      const TongueSample s = classify_param(CircleParams{a, b}, cfg);
      const InTongue* hit = s.in_tongue();
      if (hit == nullptr) throw dynamics_error(ErrorKind::Precondition, "no attracting cycle of known type at this parameter");
      const ComplexParams cp{a, b};
      const KoenigsChart chart = build_koenigs_chart(cp, hit->cycle, cfg);
      double functional = 0, symmetry = 0;
      constexpr int kSamples = 100;
      for (int k = 0; k < kSamples; ++k) {
        const double rr = 0.5 * chart.radius * (k % 10 + 1) / 10.0;
        const Complex z = chart.base + std::polar(rr, detail::kTwoPi * (k + 0.5) / kSamples);
        const Complex phi = koenigs_eval(chart, z);
        functional = std::max(functional, std::abs(koenigs_eval(chart, detail::iterate_g(cp, z, chart.period)) - chart.lambda * phi));
        symmetry = std::max(symmetry, std::abs(koenigs_reflected(chart, z) - koenigs_reflection_factor(chart) * phi));
      }
      const Complex d = koenigs_derivative_fd(chart, chart.base);
      const Complex want = Complex{0.0, 1.0} * chart.base;
      nlohmann::json j{{"type", hit->type.to_string()},
                       {"period", chart.period},
                       {"lambda", chart.lambda},
                       {"base", {chart.base.real(), chart.base.imag()}},
                       {"radius", chart.radius},
                       {"functional_residual", functional},
                       {"derivative_modulus", std::abs(d)},
                       {"derivative_direction_error", std::abs(std::arg(d / want))},
                       {"symmetry_residual", symmetry}};
      sink.write(j.dump(2) + "\n");
      sink.manifest(run_manifest("koenigs-check", {{"a", a}, {"b", b}}, cfg));
    };
  });

  // tip-exponent
  int samples = 8;
  auto* te = app.add_subcommand("tip-exponent", "width-versus-height exponent near a tongue tip (exploratory)");
  te->add_option("--type", type_text, "type K/D")->required();
  te->add_option("--samples", samples, "heights in the sampled decade")->capture_default_str()->check(CLI::Range(2, 1000));
  out_option(te);
  te->callback([&] {
    action = [&](const SolverConfig& cfg, const Sink& sink) {
      const BinaryType t = parse_type(type_text);
      const TipLocation loc = locate_tip(t, cfg);
      const TipExponent e = tip_exponent_from(t, loc.b, loc.a, samples, cfg);
      const TipExponent e2 = tip_exponent_from(t, loc.b, loc.a, 2 * samples - 1, cfg);
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& [delta, w] : e.samples) pts.push_back({delta, w});
      nlohmann::json j{{"type", t.to_string()},
                       {"b_tip", loc.b},
                       {"tip_from_cusp", loc.from_cusp},
                       {"exponent", e.exponent},
                       {"residual", e.residual},
                       {"samples", pts},
                       {"doubled_density_exponent", e2.exponent},
                       {"doubled_density_delta", e2.exponent - e.exponent}};
      sink.write(j.dump(2) + "\n");
      sink.manifest(run_manifest("tip-exponent", {{"type", t.to_string()}, {"samples", samples}}, cfg));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto chosen = app.get_subcommands();
    out << (chosen.empty() ? app.help() : chosen.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    const auto chosen = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (chosen.empty() ? app.help() : chosen.front()->help());
    return 2;
  }

  try {
    SolverConfig cfg;
    if (!cfg_path.empty()) {
      std::ifstream f(cfg_path);
      if (!f) throw std::runtime_error("cannot open " + cfg_path);
      try {
        cfg = config_from_json(nlohmann::json::parse(f));
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
      } catch (const dynamics_error& e) {
        throw UsageError(e.what());
      }
    }
    action(cfg, Sink(out_path, out, err));
    return 0;
  } catch (const UsageError& e) {
    const auto chosen = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (chosen.empty() ? app.help() : chosen.front()->help());
    return 2;
  } catch (const dynamics_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace tongue

#endif  // TONGUE_CLI_HPP
