#include "shle/io_formats.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "shle/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "PFM writer assumes a little-endian host");

namespace shle {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigurationError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void spill(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw ConfigurationError("cannot write file: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out)
    throw ConfigurationError("write failed: " + path.string());
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json parse_json(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---- PFM -------------------------------------------------------------------

FloatGrid read_pfm_grid(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  auto fail = [&](std::size_t offset, const std::string& what) {
    throw FormatError(path.string() + ": " + what + " (byte " +
                      std::to_string(offset) + ")");
  };

  if (bytes.size() < 3) fail(0, "not a PFM file: shorter than any header");
  if (bytes[0] == 'P' && bytes[1] == 'F')
    fail(0, "color 'PF' maps are not supported, expected grayscale 'Pf'");
  if (!(bytes[0] == 'P' && bytes[1] == 'f')) fail(0, "missing 'Pf' magic");
  std::size_t pos = 2;
  auto expect = [&](char c, const char* what) {
    if (pos >= bytes.size() || bytes[pos] != c) fail(pos, what);
    ++pos;
  };
  expect('\n', "expected newline after magic");

  auto parse_dim = [&](const char* what) -> long {
    const std::size_t start = pos;
    while (pos < bytes.size() &&
           std::isdigit(static_cast<unsigned char>(bytes[pos])))
      ++pos;
    if (pos == start) fail(start, std::string("expected ") + what);
    return std::strtol(bytes.c_str() + start, nullptr, 10);
  };
  const long w = parse_dim("width");
  expect(' ', "expected single space between width and height");
  const long h = parse_dim("height");
  expect('\n', "expected newline after dimensions");
  if (w <= 0 || h <= 0) fail(3, "dimensions must be positive");

  const std::size_t scale_start = pos;
  if (pos >= bytes.size() ||
      std::isspace(static_cast<unsigned char>(bytes[pos])))
    fail(pos, "expected scale");
  char* scale_end = nullptr;
  const double scale = std::strtod(bytes.c_str() + scale_start, &scale_end);
  if (scale_end == bytes.c_str() + scale_start) fail(scale_start, "expected scale");
  pos = static_cast<std::size_t>(scale_end - bytes.c_str());
  expect('\n', "expected newline after scale");
  if (scale == 0.0) fail(scale_start, "scale must be non-zero");

  const std::size_t expected = static_cast<std::size_t>(w) * h * 4;
  const std::size_t available = bytes.size() - pos;
  if (available < expected)
    fail(bytes.size(), "truncated payload: expected " +
                           std::to_string(expected) + " bytes, found " +
                           std::to_string(available));
  if (available > expected) fail(pos + expected, "trailing data after payload");

  FloatGrid grid(static_cast<int>(w), static_cast<int>(h));
  for (long row = 0; row < h; ++row) {
    const long y = h - 1 - row;  // rows are stored bottom to top
    std::memcpy(&grid.values[static_cast<std::size_t>(y) * w],
                bytes.data() + pos + static_cast<std::size_t>(row) * w * 4,
                static_cast<std::size_t>(w) * 4);
  }
  if (scale > 0.0) {  // positive scale marks big-endian payloads
    for (float& f : grid.values) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      u = __builtin_bswap32(u);
      std::memcpy(&f, &u, 4);
    }
  }
  return grid;
}

// ---- Shared JSON helpers ---------------------------------------------------

double need_number(const ordered_json& j, const char* key,
                   const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw FormatError(where + ": missing numeric field '" + key + "'");
  return j[key].get<double>();
}

BBox parse_box(const ordered_json& j, const std::string& where) {
  BBox b;
  b.x_min = need_number(j, "x", where);
  b.y_min = need_number(j, "y", where);
  b.w = need_number(j, "w", where);
  b.h = need_number(j, "h", where);
  b.score = need_number(j, "score", where);
  if (b.w < 0.0 || b.h < 0.0)
    throw ValidationError(where + ": negative box size");
  if (b.score < 0.0 || b.score > 1.0)
    throw ValidationError(where + ": score " + g17(b.score) +
                          " outside [0, 1]");
  return b;
}

ordered_json box_json(const BBox& b) {
  return ordered_json{{"x", b.x_min},
                      {"y", b.y_min},
                      {"w", b.w},
                      {"h", b.h},
                      {"score", b.score}};
}

std::vector<DetectionSet> parse_detection_frames(const ordered_json& j,
                                                 const std::string& where) {
  if (!j.contains("frames") || !j["frames"].is_array())
    throw FormatError(where + ": missing 'frames' array");
  std::vector<DetectionSet> sets;
  long last_index = -1;
  bool have_last = false;
  for (const auto& jf : j["frames"]) {
    if (!jf.is_object() || !jf.contains("index") ||
        !jf["index"].is_number_integer())
      throw FormatError(where + ": every frame needs an integer 'index'");
    DetectionSet set;
    set.frame_index = jf["index"].get<int>();
    if (have_last && set.frame_index <= last_index)
      throw ValidationError(where + ": frame indices must be strictly "
                                    "increasing (at frame " +
                            std::to_string(set.frame_index) + ")");
    last_index = set.frame_index;
    have_last = true;
    if (jf.contains("boxes")) {
      if (!jf["boxes"].is_array())
        throw FormatError(where + ": 'boxes' must be an array (frame " +
                          std::to_string(set.frame_index) + ")");
      const std::string frame_where =
          where + ": frame " + std::to_string(set.frame_index);
      for (const auto& jb : jf["boxes"]) set.boxes.push_back(parse_box(jb, frame_where));
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace

DisparityMap read_pfm(const std::filesystem::path& path) {
  DisparityMap d;
  static_cast<FloatGrid&>(d) = read_pfm_grid(path);
  return d;
}

Image read_pfm_image(const std::filesystem::path& path) {
  Image img;
  static_cast<FloatGrid&>(img) = read_pfm_grid(path);
  return img;
}

void write_pfm(const std::filesystem::path& path, const FloatGrid& grid) {
  if (grid.width <= 0 || grid.height <= 0 ||
      grid.values.size() !=
          static_cast<std::size_t>(grid.width) * grid.height)
    throw DomainError("write_pfm: inconsistent grid dimensions");
  std::string out = "Pf\n" + std::to_string(grid.width) + " " +
                    std::to_string(grid.height) + "\n-1\n";
  out.reserve(out.size() + grid.values.size() * 4);
  for (long row = grid.height - 1; row >= 0; --row)
    out.append(reinterpret_cast<const char*>(
                   &grid.values[static_cast<std::size_t>(row) * grid.width]),
               static_cast<std::size_t>(grid.width) * 4);
  spill(path, out);
}

std::vector<DetectionSet> read_detections(const std::filesystem::path& path) {
  return parse_detection_frames(parse_json(path), path.string());
}

void write_detections(const std::filesystem::path& path,
                      const std::vector<DetectionSet>& sets) {
  ordered_json frames = ordered_json::array();
  for (const DetectionSet& set : sets) {
    ordered_json boxes = ordered_json::array();
    for (const BBox& b : set.boxes) boxes.push_back(box_json(b));
    frames.push_back(
        ordered_json{{"index", set.frame_index}, {"boxes", std::move(boxes)}});
  }
  spill(path, ordered_json{{"frames", std::move(frames)}}.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw ConfigurationError("manifest not found: " + path.string());
  const ordered_json j = parse_json(path);
  const std::string where = path.string();

  if (!j.contains("camera") || !j["camera"].is_object())
    throw ConfigurationError(where + ": missing camera block");
  const auto& jc = j["camera"];

  Manifest m;
  m.base_dir = path.parent_path();

  std::string missing;
  auto grab = [&](const char* key, double& into) {
    if (jc.contains(key) && jc[key].is_number()) {
      into = jc[key].get<double>();
    } else {
      if (!missing.empty()) missing += ", ";
      missing += key;
    }
  };
  double width = 0, height = 0;
  grab("fx", m.rig.fx);
  grab("fy", m.rig.fy);
  grab("cx", m.rig.cx);
  grab("cy", m.rig.cy);
  grab("width", width);
  grab("height", height);
  grab("baseline_m", m.rig.baseline_m);
  grab("mount_height_m", m.rig.mount_height_m);
  if (!missing.empty())
    throw ConfigurationError(where + ": camera block missing: " + missing);
  m.rig.width = static_cast<int>(width);
  m.rig.height = static_cast<int>(height);

  if (jc.contains("rotation")) {
    if (!jc["rotation"].is_array() || jc["rotation"].size() != 9)
      throw ConfigurationError(where + ": camera rotation must hold 9 values");
    for (int i = 0; i < 9; ++i) m.rig.rotation[i] = jc["rotation"][i].get<double>();
  }
  if (jc.contains("translation")) {
    if (!jc["translation"].is_array() || jc["translation"].size() != 3)
      throw ConfigurationError(where +
                               ": camera translation must hold 3 values");
    for (int i = 0; i < 3; ++i)
      m.rig.translation[i] = jc["translation"][i].get<double>();
  }
  m.rig.validate();

  if (j.contains("ground_truth_height_m")) {
    if (!j["ground_truth_height_m"].is_number())
      throw ValidationError(where + ": ground_truth_height_m must be a number");
    m.ground_truth_height_m = j["ground_truth_height_m"].get<double>();
  }
  if (j.contains("detections_path")) {
    if (!j["detections_path"].is_string())
      throw ValidationError(where + ": detections_path must be a string");
    m.detections_path = j["detections_path"].get<std::string>();
    if (!std::filesystem::exists(m.base_dir / *m.detections_path))
      throw ConfigurationError(where + ": detections file not found: " +
                               *m.detections_path);
  }

  if (!j.contains("frames") || !j["frames"].is_array())
    throw ConfigurationError(where + ": missing 'frames' array");
  long last_index = -1;
  bool have_last = false;
  for (const auto& jf : j["frames"]) {
    ManifestFrame f;
    if (!jf.is_object() || !jf.contains("index") ||
        !jf["index"].is_number_integer())
      throw ConfigurationError(where + ": every frame needs an integer 'index'");
    f.index = jf["index"].get<int>();
    if (have_last && f.index <= last_index)
      throw ValidationError(where + ": frame indices must be strictly "
                                    "increasing (at frame " +
                            std::to_string(f.index) + ")");
    last_index = f.index;
    have_last = true;

    const std::string frame_where =
        where + ": frame " + std::to_string(f.index);
    if (!jf.contains("disparity_path") || !jf["disparity_path"].is_string())
      throw ConfigurationError(frame_where + " needs a disparity_path");
    f.disparity_path = jf["disparity_path"].get<std::string>();
    if (!std::filesystem::exists(m.base_dir / f.disparity_path))
      throw ConfigurationError(frame_where + ": disparity file not found: " +
                               f.disparity_path);
    if (jf.contains("image_path")) {
      if (!jf["image_path"].is_string())
        throw ValidationError(frame_where + ": image_path must be a string");
      f.image_path = jf["image_path"].get<std::string>();
      if (!std::filesystem::exists(m.base_dir / *f.image_path))
        throw ConfigurationError(frame_where + ": image file not found: " +
                                 *f.image_path);
    }
    if (jf.contains("detections")) {
      if (!jf["detections"].is_array())
        throw ValidationError(frame_where + ": detections must be an array");
      std::vector<BBox> boxes;
      for (const auto& jb : jf["detections"])
        boxes.push_back(parse_box(jb, frame_where));
      f.detections = std::move(boxes);
    }
    if (jf.contains("gt_box")) f.gt_box = parse_box(jf["gt_box"], frame_where);
    m.frames.push_back(std::move(f));
  }
  return m;
}

SceneData load_scene(const Manifest& manifest) {
  SceneData scene;
  scene.rig = manifest.rig;
  scene.ground_truth_height_m = manifest.ground_truth_height_m;

  // When an external detections file is given it replaces inline detections
  // wholesale; mixing the two sources invites silent conflicts.
  std::optional<std::vector<DetectionSet>> external;
  if (manifest.detections_path)
    external = read_detections(manifest.base_dir / *manifest.detections_path);

  for (const ManifestFrame& mf : manifest.frames) {
    SceneFrame frame;
    frame.index = mf.index;
    frame.disparity = read_pfm(manifest.base_dir / mf.disparity_path);
    if (frame.disparity.width != scene.rig.width ||
        frame.disparity.height != scene.rig.height)
      throw ValidationError("frame " + std::to_string(mf.index) +
                            ": disparity dimensions do not match the camera");
    if (mf.image_path) {
      frame.image = read_pfm_image(manifest.base_dir / *mf.image_path);
      if (frame.image->width != scene.rig.width ||
          frame.image->height != scene.rig.height)
        throw ValidationError("frame " + std::to_string(mf.index) +
                              ": image dimensions do not match the camera");
    }
    if (external) {
      for (const DetectionSet& set : *external)
        if (set.frame_index == mf.index) {
          frame.detections = set;
          break;
        }
    } else if (mf.detections) {
      frame.detections = DetectionSet{mf.index, *mf.detections};
    }
    frame.gt_box = mf.gt_box;
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

SceneData load_scene(const std::filesystem::path& manifest_path) {
  return load_scene(read_manifest(manifest_path));
}

SceneData to_scene_data(const SyntheticScene& scene) {
  SceneData out;
  out.rig = scene.rig;
  out.ground_truth_height_m = scene.truth.scene_height_m;
  out.frames.reserve(scene.frames.size());
  for (std::size_t t = 0; t < scene.frames.size(); ++t) {
    const SyntheticFrame& sf = scene.frames[t];
    SceneFrame frame;
    frame.index = sf.index;
    frame.disparity = sf.disparity;
    if (!sf.image.values.empty()) frame.image = sf.image;
    frame.detections = sf.detections;
    frame.gt_box = scene.truth.boxes[t];
    out.frames.push_back(std::move(frame));
  }
  return out;
}

void write_scene(const std::filesystem::path& dir,
                 const SyntheticScene& scene) {
  std::filesystem::create_directories(dir / "frames");

  ordered_json jframes = ordered_json::array();
  char name[64];
  for (std::size_t t = 0; t < scene.frames.size(); ++t) {
    const SyntheticFrame& frame = scene.frames[t];
    std::snprintf(name, sizeof name, "frames/disp_%04d.pfm", frame.index);
    const std::string disp_rel = name;
    write_pfm(dir / disp_rel, frame.disparity);

    ordered_json jf{{"index", frame.index}, {"disparity_path", disp_rel}};
    if (!frame.image.values.empty()) {
      std::snprintf(name, sizeof name, "frames/img_%04d.pfm", frame.index);
      const std::string img_rel = name;
      write_pfm(dir / img_rel, frame.image);
      jf["image_path"] = img_rel;
    }
    ordered_json boxes = ordered_json::array();
    for (const BBox& b : frame.detections.boxes) boxes.push_back(box_json(b));
    jf["detections"] = std::move(boxes);
    if (scene.truth.boxes[t]) jf["gt_box"] = box_json(*scene.truth.boxes[t]);
    jframes.push_back(std::move(jf));
  }

  const auto& rig = scene.rig;
  ordered_json jc{{"fx", rig.fx},
                  {"fy", rig.fy},
                  {"cx", rig.cx},
                  {"cy", rig.cy},
                  {"width", rig.width},
                  {"height", rig.height},
                  {"baseline_m", rig.baseline_m},
                  {"mount_height_m", rig.mount_height_m},
                  {"rotation", rig.rotation},
                  {"translation", rig.translation}};
  ordered_json j{{"camera", std::move(jc)},
                 {"ground_truth_height_m", scene.truth.scene_height_m},
                 {"frames", std::move(jframes)}};
  spill(dir / "manifest.json", j.dump(2) + "\n");
}

void write_results(const std::filesystem::path& path,
                   const ResultsTable& table) {
  std::string out =
      "frame_index,h_df,h_tf,box_x,box_y,box_w,box_h,n_points_after_filter\n";
  for (const ResultsRow& r : table.rows) {
    out += std::to_string(r.frame_index) + "," + g17(r.h_df) + "," +
           g17(r.h_tf) + "," + g17(r.box_x) + "," + g17(r.box_y) + "," +
           g17(r.box_w) + "," + g17(r.box_h) + "," +
           std::to_string(r.n_points_after_filter) + "\n";
  }
  out += "scene_height_m," + g17(table.scene_height_m) + "\n";
  spill(path, out);
}

ResultsTable read_results(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  std::istringstream in(text);
  std::string line;
  auto fail = [&](std::size_t line_no, const std::string& what) {
    throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " +
                      what);
  };

  if (!std::getline(in, line) ||
      line != "frame_index,h_df,h_tf,box_x,box_y,box_w,box_h,"
              "n_points_after_filter")
    fail(1, "unexpected header");

  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = s.find(',', start);
      fields.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return fields;
  };
  auto to_double = [&](const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
      fail(line_no, "malformed number '" + s + "'");
    return v;
  };
  auto to_int = [&](const std::string& s, std::size_t line_no) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || s.empty())
      fail(line_no, "malformed integer '" + s + "'");
    return static_cast<int>(v);
  };

  ResultsTable table;
  bool saw_footer = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields[0] == "scene_height_m") {
      if (fields.size() != 2) fail(line_no, "malformed footer");
      table.scene_height_m = to_double(fields[1], line_no);
      saw_footer = true;
      continue;
    }
    if (saw_footer) fail(line_no, "data after the scene_height_m footer");
    if (fields.size() != 8) fail(line_no, "expected 8 comma-separated fields");
    ResultsRow r;
    r.frame_index = to_int(fields[0], line_no);
    r.h_df = to_double(fields[1], line_no);
    r.h_tf = to_double(fields[2], line_no);
    r.box_x = to_double(fields[3], line_no);
    r.box_y = to_double(fields[4], line_no);
    r.box_w = to_double(fields[5], line_no);
    r.box_h = to_double(fields[6], line_no);
    r.n_points_after_filter = to_int(fields[7], line_no);
    table.rows.push_back(r);
  }
  if (!saw_footer) fail(line_no, "missing scene_height_m footer");
  return table;
}

void write_metrics(const std::filesystem::path& path,
                   const std::optional<HeightMetrics>& height,
                   const std::optional<BoxMetrics>& box) {
  if (!height && !box)
    throw DomainError("write_metrics: nothing to write");
  ordered_json j;
  if (height)
    j["height"] = ordered_json{{"he", height->he}, {"her", height->her}};
  if (box)
    j["box"] = ordered_json{
        {"cpd", box->cpd}, {"rcpda", box->rcpda}, {"rcpdh", box->rcpdh}};
  spill(path, j.dump(2) + "\n");
}

PipelineConfig read_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw ConfigurationError("config not found: " + path.string());
  const ordered_json j = parse_json(path);
  const std::string where = path.string();
  if (!j.is_object()) throw FormatError(where + ": config must be an object");

  PipelineConfig cfg;
  auto num = [&](const ordered_json& v, const std::string& key) {
    if (!v.is_number())
      throw ConfigurationError(where + ": '" + key + "' must be a number");
    return v.get<double>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "M") {
      cfg.M = num(value, key);
    } else if (key == "sigma") {
      cfg.sigma = num(value, key);
    } else if (key == "kde_bandwidth") {
      cfg.kde_bandwidth = num(value, key);
    } else if (key == "n_lowest") {
      cfg.n_lowest = static_cast<int>(num(value, key));
    } else if (key == "kalman_q") {
      cfg.kalman_q = num(value, key);
    } else if (key == "kalman_r") {
      cfg.kalman_r = num(value, key);
    } else if (key == "kalman_p0") {
      cfg.kalman_p0 = num(value, key);
    } else if (key == "top_margin") {
      cfg.top_margin = num(value, key);
    } else if (key == "ncc_search_radius") {
      cfg.ncc_search_radius = static_cast<int>(num(value, key));
    } else if (key == "ncc_min_peak") {
      cfg.ncc_min_peak = num(value, key);
    } else if (key == "traffic_side") {
      const std::string side = value.is_string() ? value.get<std::string>() : "";
      if (side == "right")
        cfg.traffic_side = TrafficSide::right;
      else if (side == "left")
        cfg.traffic_side = TrafficSide::left;
      else
        throw ConfigurationError(where +
                                 ": traffic_side must be 'right' or 'left'");
    } else if (key == "tracker") {
      const std::string t = value.is_string() ? value.get<std::string>() : "";
      if (t == "interpolation")
        cfg.tracker = TrackerChoice::interpolation;
      else if (t == "ncc")
        cfg.tracker = TrackerChoice::ncc;
      else
        throw ConfigurationError(
            where + ": tracker must be 'interpolation' or 'ncc'");
    } else if (key == "use_depth_filter") {
      if (!value.is_boolean())
        throw ConfigurationError(where + ": use_depth_filter must be a bool");
      cfg.use_depth_filter = value.get<bool>();
    } else if (key == "use_kde_center") {
      if (!value.is_boolean())
        throw ConfigurationError(where + ": use_kde_center must be a bool");
      cfg.use_kde_center = value.get<bool>();
    } else {
      throw ConfigurationError(where + ": unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SceneSpec read_scene_spec(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw ConfigurationError("scene spec not found: " + path.string());
  const ordered_json j = parse_json(path);
  const std::string where = path.string();
  if (!j.is_object()) throw FormatError(where + ": scene spec must be an object");

  SceneSpec spec;
  auto num = [&](const ordered_json& v, const std::string& key) {
    if (!v.is_number())
      throw ConfigurationError(where + ": '" + key + "' must be a number");
    return v.get<double>();
  };

  struct TrajectorySweep {
    double start = 0.0, end = 0.0;
    int frames = 0;
    bool row_aligned = false;
  };
  std::optional<TrajectorySweep> sweep;

  for (const auto& [key, value] : j.items()) {
    if (key == "camera") {
      if (!value.is_object())
        throw ConfigurationError(where + ": camera must be an object");
      for (const auto& [ckey, cval] : value.items()) {
        const std::string full = "camera." + ckey;
        if (ckey == "fx") spec.rig.fx = num(cval, full);
        else if (ckey == "fy") spec.rig.fy = num(cval, full);
        else if (ckey == "cx") spec.rig.cx = num(cval, full);
        else if (ckey == "cy") spec.rig.cy = num(cval, full);
        else if (ckey == "width") spec.rig.width = static_cast<int>(num(cval, full));
        else if (ckey == "height") spec.rig.height = static_cast<int>(num(cval, full));
        else if (ckey == "baseline_m") spec.rig.baseline_m = num(cval, full);
        else if (ckey == "mount_height_m") spec.rig.mount_height_m = num(cval, full);
        else if (ckey == "rotation") {
          if (!cval.is_array() || cval.size() != 9)
            throw ConfigurationError(where + ": camera rotation must hold 9 values");
          for (int i = 0; i < 9; ++i) spec.rig.rotation[i] = cval[i].get<double>();
        } else if (ckey == "translation") {
          if (!cval.is_array() || cval.size() != 3)
            throw ConfigurationError(where + ": camera translation must hold 3 values");
          for (int i = 0; i < 3; ++i) spec.rig.translation[i] = cval[i].get<double>();
        } else {
          throw ConfigurationError(where + ": unknown camera key '" + ckey + "'");
        }
      }
    } else if (key == "bar_height_m") {
      spec.bar_height_m = num(value, key);
    } else if (key == "bar_thickness_m") {
      spec.bar_thickness_m = num(value, key);
    } else if (key == "bar_x_extent_m") {
      spec.bar_x_extent_m = num(value, key);
    } else if (key == "noise_std") {
      spec.noise_std = num(value, key);
    } else if (key == "spurious_fraction") {
      spec.spurious_fraction = num(value, key);
    } else if (key == "detection_dropout") {
      spec.detection_dropout = num(value, key);
    } else if (key == "decoy_boxes") {
      spec.decoy_boxes = static_cast<int>(num(value, key));
    } else if (key == "seed") {
      if (!value.is_number_integer())
        throw ConfigurationError(where + ": seed must be an integer");
      spec.seed = value.get<std::uint64_t>();
    } else if (key == "render_images") {
      if (!value.is_boolean())
        throw ConfigurationError(where + ": render_images must be a bool");
      spec.render_images = value.get<bool>();
    } else if (key == "depth_trajectory") {
      if (value.is_array()) {
        for (const auto& z : value)
          spec.depth_trajectory.push_back(num(z, "depth_trajectory[]"));
      } else if (value.is_object()) {
        TrajectorySweep s;
        bool saw_start = false, saw_end = false, saw_frames = false;
        for (const auto& [tkey, tval] : value.items()) {
          if (tkey == "start") { s.start = num(tval, "depth_trajectory.start"); saw_start = true; }
          else if (tkey == "end") { s.end = num(tval, "depth_trajectory.end"); saw_end = true; }
          else if (tkey == "frames") { s.frames = static_cast<int>(num(tval, "depth_trajectory.frames")); saw_frames = true; }
          else if (tkey == "row_aligned") {
            if (!tval.is_boolean())
              throw ConfigurationError(where + ": depth_trajectory.row_aligned must be a bool");
            s.row_aligned = tval.get<bool>();
          } else {
            throw ConfigurationError(where + ": unknown depth_trajectory key '" + tkey + "'");
          }
        }
        if (!saw_start || !saw_end || !saw_frames)
          throw ConfigurationError(
              where + ": depth_trajectory sweep needs start, end and frames");
        if (s.frames < 1)
          throw ConfigurationError(where + ": depth_trajectory.frames must be >= 1");
        sweep = s;
      } else {
        throw ConfigurationError(
            where + ": depth_trajectory must be an array or a sweep object");
      }
    } else {
      throw ConfigurationError(where + ": unknown scene spec key '" + key + "'");
    }
  }

  // Sweeps expand last so they see the final camera and bar height.
  if (sweep) {
    if (sweep->row_aligned) {
      spec.depth_trajectory = row_aligned_depths(
          spec.rig, spec.bar_height_m, sweep->start, sweep->end, sweep->frames);
    } else {
      spec.depth_trajectory.reserve(sweep->frames);
      for (int k = 0; k < sweep->frames; ++k) {
        const double t =
            sweep->frames == 1
                ? 0.0
                : static_cast<double>(k) / (sweep->frames - 1);
        spec.depth_trajectory.push_back(sweep->start +
                                        (sweep->end - sweep->start) * t);
      }
    }
  }
  spec.validate();
  return spec;
}

}  // namespace shle
