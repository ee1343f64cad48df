#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "tongue/cli.hpp"
#include "tongue/render.hpp"

using namespace tongue;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "tongue-atlas");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("tongue-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" + std::to_string(counter()++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path path_;
};

}  // namespace

TEST(Manifest, JsonRoundTripKeepsEveryField) {
  for (RenderMode mode : {RenderMode::Tongues, RenderMode::ComplexClasses}) {
    RenderManifest m = RenderManifest::defaults(mode);
    m.width = 33;
    m.cfg.max_period = 12;
    m.palette["Undecided"] = Rgb{1, 2, 3};
    const nlohmann::json j = to_json(m);
    const RenderManifest back = manifest_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.width, 33);
    EXPECT_EQ(back.cfg.max_period, 12);
    EXPECT_EQ(back.palette.at("Undecided"), (Rgb{1, 2, 3}));
    EXPECT_EQ(back.mode, mode);
  }
}

TEST(Manifest, SerializedKeysAreSorted) {
  const std::string text = to_json(RenderManifest::defaults(RenderMode::Tongues)).dump();
  std::vector<std::size_t> at;
  for (const char* key : {"\"cfg\"", "\"height\"", "\"mode\"", "\"palette\"", "\"tool_version\"", "\"width\"", "\"window\""}) {
    at.push_back(text.find(key));
    ASSERT_NE(at.back(), std::string::npos) << key;
  }
  EXPECT_TRUE(std::is_sorted(at.begin(), at.end()));
}

TEST(Manifest, MalformedInputIsRejected) {
  EXPECT_THROW(manifest_from_json(nlohmann::json::object()), dynamics_error);
  EXPECT_THROW(manifest_from_json(nlohmann::json{{"mode", "spirals"}}), dynamics_error);
  EXPECT_THROW(manifest_from_json(nlohmann::json{{"mode", "tongues"}, {"width", 0}}), dynamics_error);
  const RenderManifest partial = manifest_from_json(nlohmann::json{{"mode", "tongues"}, {"cfg", {{"max_period", 8}}}});
  EXPECT_EQ(partial.cfg.max_period, 8);
  EXPECT_EQ(partial.cfg.max_transient, SolverConfig{}.max_transient);
}

TEST(Render, TonguesOnlyAboveHalf) {
  RenderManifest m = RenderManifest::defaults(RenderMode::Tongues);
  m.window = Window{0.0, 1.0, 0.25, 1.0};
  m.width = 65;
  m.height = 24;
  const Rendering r = render(m, 2);
  const Grid g{m.window, m.width, m.height};
  const Rgb white = m.palette.at("NoAttractor");
  const Rgb fixed_color = m.palette.at("period_1");
  for (int row = 0; row < m.height; ++row) {
    if (g.b_at(row) <= 0.5) {
      for (int col = 0; col < m.width; ++col) EXPECT_EQ(r.image.pixel(row, col), white) << row << "," << col;
    } else {
      EXPECT_NEAR(g.a_at(32), 0.5, 1e-15);
      EXPECT_EQ(r.image.pixel(row, 32), fixed_color) << "row " << row;
    }
  }
  long total = 0;
  for (const LegendRow& l : r.legend) total += l.pixels;
  EXPECT_EQ(total, 65L * 24);
}

TEST(Render, RasterIsIndependentOfThreadCount) {
  const Grid g{Window{0.0, 1.0, 0.5, 1.0}, 48, 24};
  SolverConfig cfg;
  const TongueRaster one = rasterize_tongues(g, cfg, 1);
  const TongueRaster four = rasterize_tongues(g, cfg, 4);
  ASSERT_EQ(one.cells.size(), four.cells.size());
  for (std::size_t i = 0; i < one.cells.size(); ++i) {
    EXPECT_EQ(one.cells[i].kind, four.cells[i].kind);
    EXPECT_EQ(one.cells[i].type, four.cells[i].type);
    EXPECT_EQ(one.cells[i].multiplier, four.cells[i].multiplier);
  }
  EXPECT_EQ(complex_classes(g, cfg, 1), complex_classes(g, cfg, 4));
}

TEST(Render, ComplexPlaneColors) {
  RenderManifest m = RenderManifest::defaults(RenderMode::ComplexClasses);
  m.window = Window{0.25, 0.75, 0.5, 1.5};
  m.width = 3;
  m.height = 3;
  const Rendering center = render(m, 1);
  EXPECT_EQ(center.image.pixel(1, 1), m.palette.at("CircleAttracting"));

  m.window = Window{-0.5, 0.5, 1.2, 2.0};
  m.width = 32;
  m.height = 8;
  const Rendering top = render(m, 2);
  long red = 0, green = 0;
  for (const LegendRow& l : top.legend) {
    if (l.label == "EscapeZero") red = l.pixels;
    if (l.label == "EscapeInfinity") green = l.pixels;
  }
  EXPECT_GT(red, 0);
  EXPECT_GT(green, 0);
}

TEST(Render, TonguePlaneMatchesComplexPlane) {
  const Grid g{Window{0.0, 1.0, 0.5, 1.0}, 64, 32};
  SolverConfig cfg;
  const PlaneAgreement agree = compare_planes(rasterize_tongues(g, cfg, 2), complex_classes(g, cfg, 2));
  EXPECT_GT(agree.compared, 64 * 32 * 9 / 10);
  EXPECT_GE(agree.fraction(), 0.99);
}

TEST(Render, PpmAndLegendFormats) {
  Image img{3, 2, std::vector<std::uint8_t>(18, 7)};
  std::ostringstream ppm;
  write_ppm(ppm, img);
  EXPECT_EQ(ppm.str(), std::string("P6\n3 2\n255\n") + std::string(18, '\x07'));
  std::ostringstream csv;
  write_legend_csv(csv, {{"1/3", Rgb{255, 127, 14}, 12}, {"Undecided", Rgb{0, 0, 0}, 0}});
  EXPECT_EQ(csv.str(), "type,color,pixels\n1/3,#FF7F0E,12\nUndecided,#000000,0\n");
}

TEST(Cli, AtlasListsAllParameters) {
  const CliRun r = run({"atlas", "--period", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "type,a_super");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 7);
  EXPECT_NE(r.err.find("\"command\": \"atlas\""), std::string::npos);
}

TEST(Cli, ClassifyPrintsJson) {
  const CliRun r = run({"classify", "--a", "0.5", "--b", "0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("outcome"), "InTongue");
  EXPECT_EQ(j.at("type"), "0/1");
  EXPECT_NEAR(j.at("multiplier").get<double>(), 0.2, 1e-12);
}

TEST(Cli, UsageErrorsExitWithTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"section", "--type", "1/2", "--b", "0.9"},
           {"classify", "--a", "0.5"},
           {"classify", "--a", "0.5", "--b", "1.5"},
           {"frobnicate"},
           {"render", "--mode", "spirals", "--out", "unused.ppm"}}) {
    const CliRun r = run(args);
    EXPECT_EQ(r.code, 2) << args.front();
    EXPECT_NE(r.err.find("error"), std::string::npos);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
  }
}

TEST(Cli, DomainErrorsExitWithOne) {
  const CliRun r = run({"koenigs-check", "--a", "0.1", "--b", "0.3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Precondition"), std::string::npos);
  const CliRun p = run({"path", "--type", "1/3", "--a", "0.5", "--b", "0.9"});
  EXPECT_EQ(p.code, 1);
}

TEST(Cli, HelpAndVersion) {
  const CliRun h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("atlas"), std::string::npos);
  EXPECT_NE(h.out.find("render"), std::string::npos);
  const CliRun v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, std::string(kToolVersion) + "\n");
}

TEST(Cli, ConnectSmallWindow) {
  const CliRun r = run({"connect", "--type", "0/1", "--width", "64", "--height", "64", "--a-min", "0.3", "--a-max",
                        "0.7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("status"), "PASS");
  EXPECT_EQ(j.at("components"), 1);
  const CliRun tiny = run({"connect", "--type", "0/1", "--width", "1", "--height", "1"});
  ASSERT_EQ(tiny.code, 0);
  EXPECT_EQ(nlohmann::json::parse(tiny.out).at("resolution_ok"), false);
}

TEST(Cli, KoenigsCheck) {
  const CliRun r = run({"koenigs-check", "--a", "0.47", "--b", "0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_LT(j.at("functional_residual").get<double>(), 1e-6);
  EXPECT_NEAR(j.at("derivative_modulus").get<double>(), 1.0, 1e-6);
  EXPECT_LT(j.at("symmetry_residual").get<double>(), 1e-8);
}

TEST(Cli, RenderManifestReproducesTheImage) {
  TempDir dir;
  const std::string first = (dir / "a.ppm").string();
  const std::string second = (dir / "b.ppm").string();
  const CliRun r1 = run({"render", "--mode", "tongues", "--width", "24", "--height", "12", "--out", first});
  ASSERT_EQ(r1.code, 0) << r1.err;
  ASSERT_TRUE(fs::exists(first + ".manifest.json"));
  ASSERT_TRUE(fs::exists(first + ".legend.csv"));
  const CliRun r2 = run({"render", "--manifest", first + ".manifest.json", "--out", second});
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(slurp(first), slurp(second));
  EXPECT_EQ(slurp(first + ".legend.csv"), slurp(second + ".legend.csv"));
  EXPECT_EQ(slurp(first + ".manifest.json"), slurp(second + ".manifest.json"));
  EXPECT_EQ(slurp(first).substr(0, 12), "P6\n24 12\n255");

  const std::string bad = (dir / "bad.json").string();
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(run({"render", "--manifest", bad, "--out", second}).code, 2);
}

TEST(Cli, ConfigFileOverridesSettings) {
  TempDir dir;
  const std::string cfg = (dir / "cfg.json").string();
  std::ofstream(cfg) << R"({"phi_depth": 30})";
  const CliRun r = run({"--config", cfg, "classify", "--a", "0.5", "--b", "0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("\"phi_depth\": 30"), std::string::npos);
}
