#include "oasis_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oasis/errors.hpp"
#include "oasis/eval.hpp"
#include "oasis/graph.hpp"
#include "oasis/pipeline.hpp"
#include "oasis/synth.hpp"

namespace oasis::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json read_json(fs::path const& path) {
  std::ifstream in{path};
  if (!in) throw IoError("cannot open", path.string());
  try {
    return json::parse(in);
  } catch (json::parse_error const& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text(fs::path const& path, std::string const& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out{path, std::ios::binary};
  if (!out) throw IoError("cannot write", path.string());
  out << text;
  if (!out) throw IoError("failed writing", path.string());
}

std::string flag_name(std::string key) {
  std::ranges::replace(key, '_', '-');
  return "--" + key;
}

struct SynthArgs {
  std::string scene;
  std::string out;
  std::uint64_t seed = 0;
  double frame_rate = 15.0;
};

struct MapArgs {
  std::string manifest;
  std::string out;
  std::string config;
  std::string report;
  std::vector<std::string> sets;
  std::map<std::string, std::string> fields;  // per-field flags
};

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string out;
  double buffer_m = 1.5;
  double spacing_m = 1.0;
};

int do_synth(SynthArgs const& a, std::ostream& out) {
  SceneSpec scene;
  if (auto b = builtin_scene(a.scene)) {
    scene = *b;
  } else if (fs::exists(a.scene)) {
    scene = load_scene(a.scene);
  } else {
    throw IoError("unknown scene (not a built-in name or a file)", a.scene);
  }
  auto const camera = scene_camera(scene);
  auto const manifest = generate_dataset(scene, camera, a.frame_rate, a.out, a.seed);
  out << "manifest: " << manifest.string() << '\n'
      << "truth: " << (fs::path{a.out} / "truth.geojson").string() << '\n';
  return kOk;
}

int do_map(MapArgs const& a, std::ostream& out, std::ostream& err) {
  PipelineConfig config;
  if (!a.config.empty()) config = load_config(a.config);
  for (auto const& [key, value] : a.fields) apply_override(config, key + "=" + value);
  for (auto const& s : a.sets) apply_override(config, s);
  config.validate();

  auto const result = run_map(a.manifest, config, [&](std::string_view msg) { err << "warning: " << msg << '\n'; });
  auto const doc = map_document(result, config);
  write_text(a.out, doc.dump(2) + "\n");

  auto const summary = format_summary(summarize(result.graph, result.objects, config.min_width_m));
  out << summary;
  if (!a.report.empty()) write_text(a.report, summary);
  return kOk;
}

int do_eval(EvalArgs const& a, std::ostream& out) {
  auto const pred = from_geojson(read_json(a.pred));
  auto const truth = from_geojson(read_json(a.truth));
  EvalParams params;
  params.buffer_m = a.buffer_m;
  params.spacing_m = a.spacing_m;
  auto const report = evaluate(pred, truth, params);
  write_text(a.out, to_json(report).dump(2) + "\n");
  out << format_report(report);
  return kOk;
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sidewalk network mapping from segmented street-level imagery", "oasis"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Render a synthetic survey dataset with ground truth");
  synth->add_option("--scene", sa.scene, "Built-in scene name (corridor, grid, fragmented) or scene file")
      ->required();
  synth->add_option("--out", sa.out, "Output directory")->required();
  synth->add_option("--seed", sa.seed, "Noise seed");
  synth->add_option("--frame-rate", sa.frame_rate, "Frames per second")->check(CLI::PositiveNumber);

  MapArgs ma;
  auto* map = app.add_subcommand("map", "Build the path graph and object registry from a survey");
  map->add_option("--manifest", ma.manifest, "Survey manifest (JSON lines)")->required();
  map->add_option("--out", ma.out, "Output GeoJSON")->required();
  map->add_option("--config", ma.config, "Config file (JSON)");
  map->add_option("--report", ma.report, "Write the summary report here");
  map->add_option("--set", ma.sets, "Override a config field: key=value");
  auto const defaults = to_json(PipelineConfig{});
  for (auto const& [key, _] : defaults.items()) {
    map->add_option_function<std::string>(
        flag_name(key), [&ma, key = key](std::string const& v) { ma.fields[key] = v; },
        "Override config field " + key);
  }

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Compare a predicted map with ground truth");
  ev->add_option("--pred", ea.pred, "Predicted GeoJSON")->required();
  ev->add_option("--truth", ea.truth, "Ground-truth GeoJSON")->required();
  ev->add_option("--out", ea.out, "Metrics report (JSON)")->required();
  ev->add_option("--buffer-m", ea.buffer_m, "Match buffer in meters")->check(CLI::PositiveNumber);
  ev->add_option("--spacing-m", ea.spacing_m, "Resampling interval in meters")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e, out, err);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e, out, err);
  } catch (CLI::ParseError const& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  try {
    if (synth->parsed()) return do_synth(sa, out);
    if (map->parsed()) return do_map(ma, out, err);
    if (ev->parsed()) return do_eval(ea, out);
  } catch (IoError const& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (Error const& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (json::exception const& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

}  // namespace oasis::cli
