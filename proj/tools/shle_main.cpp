// Command-line front end: estimate heights from a scene manifest, evaluate
// results against ground truth, synthesize benchmark scenes, sweep one
// hyperparameter, and plot height series as SVG.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shle/errors.hpp"
#include "shle/io_formats.hpp"
#include "shle/metrics.hpp"
#include "shle/pipeline.hpp"
#include "shle/synthetic.hpp"

namespace {

using namespace shle;

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Validation-class problems (bad input, bad flags) exit 1; everything that
// goes wrong while computing exits 2.
int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::configuration:
    case ErrorCode::domain:
    case ErrorCode::format:
    case ErrorCode::validation:
    case ErrorCode::usage:
    case ErrorCode::degenerate_spec:
      return 1;
    default:
      return 2;
  }
}

PipelineConfig config_or_default(const std::string& path) {
  if (path.empty()) return PipelineConfig{};
  return read_config(path);
}

// ---- plot ------------------------------------------------------------------

struct PlotRange {
  double lo = 0.0, hi = 1.0;
  double map(double v, double out_lo, double out_hi) const {
    const double span = hi - lo;
    const double t = span == 0.0 ? 0.5 : (v - lo) / span;
    return out_lo + t * (out_hi - out_lo);
  }
};

void write_height_svg(const std::filesystem::path& path,
                      const ResultsTable& table) {
  const double width = 960, height = 540;
  const double left = 70, right = width - 30, top = 30, bottom = height - 50;

  PlotRange xr, yr;
  if (!table.rows.empty()) {
    xr.lo = xr.hi = table.rows.front().frame_index;
    yr.lo = yr.hi = table.rows.front().h_df;
    for (const ResultsRow& r : table.rows) {
      xr.lo = std::min(xr.lo, double(r.frame_index));
      xr.hi = std::max(xr.hi, double(r.frame_index));
      yr.lo = std::min({yr.lo, r.h_df, r.h_tf});
      yr.hi = std::max({yr.hi, r.h_df, r.h_tf});
    }
    const double pad = (yr.hi - yr.lo) == 0.0 ? 0.5 : 0.05 * (yr.hi - yr.lo);
    yr.lo -= pad;
    yr.hi += pad;
  }

  auto points = [&](auto&& field) {
    std::string s;
    char buf[64];
    for (const ResultsRow& r : table.rows) {
      const double x = xr.map(r.frame_index, left, right);
      const double y = yr.map(field(r), bottom, top);  // y grows downward
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
      s += buf;
    }
    if (!s.empty()) s.pop_back();
    return s;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" "
         "height=\"540\" viewBox=\"0 0 960 540\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" "
         "fill=\"#ffffff\"/>\n";
  char line[256];
  std::snprintf(line, sizeof line,
                "  <line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" "
                "stroke=\"#333\"/>\n",
                left, bottom, right, bottom);
  svg += line;
  std::snprintf(line, sizeof line,
                "  <line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" "
                "stroke=\"#333\"/>\n",
                left, top, left, bottom);
  svg += line;
  std::snprintf(line, sizeof line,
                "  <text x=\"%.0f\" y=\"%.0f\" font-size=\"14\" "
                "text-anchor=\"middle\">frame</text>\n",
                (left + right) / 2, height - 12);
  svg += line;
  std::snprintf(line, sizeof line,
                "  <text x=\"18\" y=\"%.0f\" font-size=\"14\" "
                "text-anchor=\"middle\" transform=\"rotate(-90 18 %.0f)\">"
                "height above ground (m)</text>\n",
                (top + bottom) / 2, (top + bottom) / 2);
  svg += line;
  if (!table.rows.empty()) {
    std::snprintf(line, sizeof line,
                  "  <text x=\"%.0f\" y=\"%.0f\" font-size=\"12\">%.3f</text>\n",
                  8.0, bottom, yr.lo);
    svg += line;
    std::snprintf(line, sizeof line,
                  "  <text x=\"%.0f\" y=\"%.0f\" font-size=\"12\">%.3f</text>\n",
                  8.0, top + 4, yr.hi);
    svg += line;
  }
  svg += "  <text x=\"800\" y=\"24\" font-size=\"13\" fill=\"#888888\">"
         "h_df (raw)</text>\n";
  svg += "  <text x=\"880\" y=\"24\" font-size=\"13\" fill=\"#cc2222\">"
         "h_tf (filtered)</text>\n";
  svg += "  <polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" "
         "points=\"" +
         points([](const ResultsRow& r) { return r.h_df; }) + "\"/>\n";
  svg += "  <polyline fill=\"none\" stroke=\"#cc2222\" stroke-width=\"2\" "
         "points=\"" +
         points([](const ResultsRow& r) { return r.h_tf; }) + "\"/>\n";
  svg += "</svg>\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigurationError("cannot write file: " + path.string());
  out << svg;
  out.flush();
  if (!out) throw ConfigurationError("write failed: " + path.string());
}

// ---- subcommand bodies -----------------------------------------------------

int cmd_estimate(const std::string& manifest, const std::string& config,
                 const std::string& out) {
  const PipelineConfig cfg = config_or_default(config);
  const SceneData scene = load_scene(manifest);
  const SceneEstimate estimate = run_scene(scene, cfg);
  write_results(out, estimate.to_results());
  std::cout << "scene_height_m=" << g17(estimate.series.scene_height_m)
            << "\n";
  return 0;
}

int cmd_eval(const std::string& results_path, const std::string& manifest_path,
             const std::string& out) {
  const ResultsTable results = read_results(results_path);
  const Manifest manifest = read_manifest(manifest_path);
  if (!manifest.ground_truth_height_m)
    throw ValidationError(manifest_path +
                          ": no ground_truth_height_m to evaluate against");

  const HeightMetrics height =
      height_metrics(results.scene_height_m, *manifest.ground_truth_height_m);

  std::vector<BoxMetrics> per_frame;
  for (const ManifestFrame& mf : manifest.frames) {
    if (!mf.gt_box) continue;
    for (const ResultsRow& row : results.rows) {
      if (row.frame_index != mf.index) continue;
      const BBox pred{row.box_x, row.box_y, row.box_w, row.box_h, 1.0};
      per_frame.push_back(box_metrics(pred, *mf.gt_box));
      break;
    }
  }
  std::optional<BoxMetrics> box;
  if (!per_frame.empty()) box = aggregate(per_frame);

  write_metrics(out, height, box);
  std::cout << "he=" << g17(height.he) << "\n";
  std::cout << "her=" << g17(height.her) << "\n";
  if (box) std::cout << "cpd=" << g17(box->cpd) << "\n";
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  const SceneSpec spec = read_scene_spec(spec_path);
  const SyntheticScene scene = generate_scene(spec);
  write_scene(out_dir, scene);
  std::cout << (std::filesystem::path(out_dir) / "manifest.json").string()
            << "\n";
  return 0;
}

int cmd_sweep(const std::string& param, const std::vector<double>& values,
              const std::string& manifest_path, const std::string& config,
              const std::string& out) {
  using Setter = std::function<void(PipelineConfig&, double)>;
  static const std::map<std::string, Setter> setters = {
      {"M", [](PipelineConfig& c, double v) { c.M = v; }},
      {"sigma", [](PipelineConfig& c, double v) { c.sigma = v; }},
      {"kde_bandwidth",
       [](PipelineConfig& c, double v) { c.kde_bandwidth = v; }},
      {"n_lowest",
       [](PipelineConfig& c, double v) {
         c.n_lowest = static_cast<int>(std::lround(v));
       }},
      {"kalman_q", [](PipelineConfig& c, double v) { c.kalman_q = v; }},
      {"kalman_r", [](PipelineConfig& c, double v) { c.kalman_r = v; }},
  };
  const auto it = setters.find(param);
  if (it == setters.end())
    throw Error(ErrorCode::usage,
                "unknown sweep parameter '" + param +
                    "' (valid: M, sigma, kde_bandwidth, n_lowest, kalman_q, "
                    "kalman_r)");
  if (values.empty())
    throw Error(ErrorCode::usage, "sweep needs at least one value");

  const PipelineConfig base = config_or_default(config);
  const SceneData scene = load_scene(manifest_path);
  if (!scene.ground_truth_height_m)
    throw ValidationError(manifest_path +
                          ": sweep needs ground_truth_height_m");

  std::string csv = "value,he,her\n";
  for (const double value : values) {
    PipelineConfig cfg = base;
    it->second(cfg, value);
    const SceneEstimate estimate = run_scene(scene, cfg);
    const HeightMetrics m = height_metrics(estimate.series.scene_height_m,
                                           *scene.ground_truth_height_m);
    csv += g17(value) + "," + g17(m.he) + "," + g17(m.her) + "\n";
    std::cout << param << "=" << g17(value) << " he=" << g17(m.he)
              << " her=" << g17(m.her) << "\n";
  }
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigurationError("cannot write file: " + out);
  file << csv;
  file.flush();
  if (!file) throw ConfigurationError("write failed: " + out);
  return 0;
}

int cmd_plot(const std::string& results_path, const std::string& out) {
  write_height_svg(out, read_results(results_path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stereo height-limit estimation"};
  app.require_subcommand(1);

  std::string manifest, config, out, results, spec, param;
  std::vector<double> values;

  CLI::App* est = app.add_subcommand("estimate", "run the pipeline on a scene");
  est->add_option("--manifest", manifest, "scene manifest JSON")->required();
  est->add_option("--config", config, "pipeline config JSON");
  est->add_option("--out", out, "results CSV path")->required();

  CLI::App* ev = app.add_subcommand("eval", "score results against ground truth");
  ev->add_option("--results", results, "results CSV path")->required();
  ev->add_option("--manifest", manifest, "scene manifest JSON")->required();
  ev->add_option("--out", out, "metrics JSON path")->required();

  CLI::App* sy = app.add_subcommand("synth", "render a synthetic scene");
  sy->add_option("--spec", spec, "scene spec JSON")->required();
  sy->add_option("--out", out, "output directory")->required();

  CLI::App* sw = app.add_subcommand("sweep", "rerun over one hyperparameter");
  sw->add_option("--param", param, "hyperparameter name")->required();
  sw->add_option("--values", values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sw->add_option("--manifest", manifest, "scene manifest JSON")->required();
  sw->add_option("--config", config, "pipeline config JSON");
  sw->add_option("--out", out, "sweep table CSV path")->required();

  CLI::App* pl = app.add_subcommand("plot", "render a height-vs-frame SVG");
  pl->add_option("--results", results, "results CSV path")->required();
  pl->add_option("--out", out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (est->parsed()) return cmd_estimate(manifest, config, out);
    if (ev->parsed()) return cmd_eval(results, manifest, out);
    if (sy->parsed()) return cmd_synth(spec, out);
    if (sw->parsed()) return cmd_sweep(param, values, manifest, config, out);
    if (pl->parsed()) return cmd_plot(results, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
