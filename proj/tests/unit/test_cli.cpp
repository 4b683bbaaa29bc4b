#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oasis/synth.hpp"
#include "oasis_cli/cli.hpp"
#include "oracles.hpp"

using namespace oasis;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int const code = oasis::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(std::filesystem::path const& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path write_scene(std::filesystem::path const& dir, SceneSpec const& scene) {
  auto const path = dir / "scene.json";
  std::ofstream(path) << scene_to_json(scene).dump(2);
  return path;
}

// Three straight pieces separated by 4 m and 5 m holes.
SceneSpec small_fragmented() {
  auto s = oracle::small_corridor(20.0, 0);
  s.name = "small-fragmented";
  s.paths = {{{{0, 0}, {0, 20}}, {1.8, 1.8}, EdgeKind::sidewalk},
             {{{0, 24}, {0, 44}}, {1.8, 1.8}, EdgeKind::sidewalk},
             {{{0, 49}, {0, 70}}, {1.8, 1.8}, EdgeKind::sidewalk}};
  s.trajectory = {{0, -5}, {0, 70}};
  return s;
}

std::size_t disconnections(std::filesystem::path const& geojson) {
  return from_geojson(nlohmann::json::parse(slurp(geojson))).graph.disconnections.size();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("synth, map and eval on a small corridor") {
    auto const dir = oracle::scratch_dir("cli_corridor");
    auto const scene = write_scene(dir, oracle::small_corridor(30.0, 2));
    auto const s = run_cli({"synth", "--scene", scene.string(), "--out", (dir / "data").string(), "--seed", "1"});
    REQUIRE_MESSAGE(s.code == 0, s.err);
    CHECK(std::filesystem::exists(dir / "data" / "manifest.jsonl"));
    CHECK(std::filesystem::exists(dir / "data" / "truth.geojson"));

    auto const m = run_cli({"map", "--manifest", (dir / "data" / "manifest.jsonl").string(), "--out",
                        (dir / "map.geojson").string(), "--report", (dir / "report.txt").string(),
                        "--min-region-px", "10"});
    REQUIRE_MESSAGE(m.code == 0, m.err);
    CHECK(m.out.find("edges:") != std::string::npos);
    CHECK(slurp(dir / "report.txt") == m.out);
    auto const doc = nlohmann::json::parse(slurp(dir / "map.geojson"));
    CHECK(doc["metadata"]["config"]["min_region_px"] == 10);

    auto const e = run_cli({"eval", "--pred", (dir / "map.geojson").string(), "--truth",
                        (dir / "data" / "truth.geojson").string(), "--out", (dir / "eval.json").string()});
    REQUIRE_MESSAGE(e.code == 0, e.err);
    auto const report = nlohmann::json::parse(slurp(dir / "eval.json"));
    CHECK(report["graph"]["precision"].get<double>() >= 0.99);
    CHECK(report["graph"]["recall"].get<double>() >= 0.95);
    CHECK(e.out.find("RMSE") != std::string::npos);
  }

  TEST_CASE("errors map to exit codes") {
    auto const dir = oracle::scratch_dir("cli_errors");
    auto const missing = (dir / "nope" / "manifest.jsonl").string();
    auto const r = run_cli({"map", "--manifest", missing, "--out", (dir / "x.geojson").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find(missing) != std::string::npos);

    auto const u = run_cli({"map", "--bogus"});
    CHECK(u.code == 1);
    CHECK(u.err.find("Usage") != std::string::npos);

    auto const bad = run_cli({"synth", "--scene", "no-such-scene", "--out", (dir / "d").string()});
    CHECK(bad.code != 0);

    auto const help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("synth") != std::string::npos);

    std::ofstream(dir / "bad.json") << R"({"k_window": -3})";
    auto const cfg = run_cli({"map", "--manifest", missing, "--out", (dir / "x.geojson").string(), "--config",
                          (dir / "bad.json").string()});
    CHECK(cfg.code == 1);
  }

  TEST_CASE("larger gap thresholds report at least as many disconnections") {
    auto const dir = oracle::scratch_dir("cli_gaps");
    auto const scene = write_scene(dir, small_fragmented());
    REQUIRE(run_cli({"synth", "--scene", scene.string(), "--out", (dir / "data").string()}).code == 0);
    auto const manifest = (dir / "data" / "manifest.jsonl").string();
    std::vector<std::size_t> counts;
    for (auto const* t : {"1.0", "3.0", "8.0"}) {
      auto const out = dir / (std::string{"map_"} + t + ".geojson");
      auto const r = run_cli({"map", "--manifest", manifest, "--out", out.string(), "--set",
                          std::string{"gap_threshold_m="} + t});
      REQUIRE_MESSAGE(r.code == 0, r.err);
      counts.push_back(disconnections(out));
    }
    CHECK(counts[0] <= counts[1]);
    CHECK(counts[1] < counts[2]);
    CHECK(counts[2] == 2);
  }

  TEST_CASE("map output is byte-identical across runs") {
    auto const dir = oracle::scratch_dir("cli_determinism");
    auto const scene = write_scene(dir, oracle::small_corridor(15.0, 1));
    REQUIRE(run_cli({"synth", "--scene", scene.string(), "--out", (dir / "data").string(), "--seed", "4"}).code == 0);
    auto const manifest = (dir / "data" / "manifest.jsonl").string();
    REQUIRE(run_cli({"map", "--manifest", manifest, "--out", (dir / "a.geojson").string()}).code == 0);
    REQUIRE(run_cli({"map", "--manifest", manifest, "--out", (dir / "b.geojson").string()}).code == 0);
    CHECK(slurp(dir / "a.geojson") == slurp(dir / "b.geojson"));
  }
}
