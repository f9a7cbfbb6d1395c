#pragma once

// End-to-end fish segmentation pipeline and batch runner.
//
// Per image: resize -> reshape -> k-means -> reconstruct -> grayscale -> CLAHE
// -> HE -> binarize -> open -> close -> thicken -> Canny -> overlay, plus one
// SSIM score. A batch writes every stage raster under <out>/<stem>/ together
// with report.json and ssim.csv.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fishseg/edges.hpp"
#include "fishseg/enhance.hpp"
#include "fishseg/image.hpp"
#include "fishseg/kmeans.hpp"
#include "fishseg/metrics.hpp"
#include "fishseg/morphology.hpp"
#include "fishseg/pnm.hpp"
#include "fishseg/preprocess.hpp"

namespace fishseg {

namespace fs = std::filesystem;

/// Which two 8-bit rasters the per-image SSIM compares.
enum class SsimPair {
  resized_vs_segmented,  // gray(resized original) vs gray(k-means reconstruction)
  gray_vs_enhanced,      // gray(k-means reconstruction) vs CLAHE+HE output
};

inline const char* to_string(SsimPair p) {
  return p == SsimPair::resized_vs_segmented ? "resized-gray:segmented-gray" : "gray:enhanced";
}

inline constexpr const char* kDefaultStrel = "line:3:45";
inline constexpr const char* kLiteralStrel = "line:1:45";

struct PipelineConfig {
  int resize_w = 50;
  int resize_h = 50;
  ResizeKernel resize_kernel = ResizeKernel::bilinear;
  int k = 8;
  std::uint64_t seed = 0;
  int restarts = 5;
  KMeansOptions kmeans;
  ClaheParams clahe;
  Threshold threshold = Threshold::otsu();
  std::string strel = kDefaultStrel;
  int thicken_passes = 1;
  CannyParams canny;
  SsimPair ssim_pair = SsimPair::resized_vs_segmented;
  SsimParams ssim;
  int histogram_bins = 50;
  Rgb overlay_color{255, 0, 0};
  bool emit_histograms = false;
  fs::path output_dir = "out";
  int jobs = 0;  // 0 = hardware concurrency

  void validate() const {
    if (resize_w < 1 || resize_h < 1) throw ArgumentError("config: resize dimensions must be >= 1");
    if (k < 1) throw ArgumentError("config: k must be >= 1");
    if (restarts < 1) throw ArgumentError("config: restarts must be >= 1");
    if (kmeans.max_iter < 1) throw ArgumentError("config: max_iter must be >= 1");
    if (!(kmeans.tol >= 0.0)) throw ArgumentError("config: tol must be >= 0");
    clahe.validate();
    if (threshold.kind == Threshold::Kind::fixed &&
        (threshold.level < 0 || threshold.level > kMaxLevel)) {
      throw ArgumentError("config: fixed threshold must lie in [0, 255]");
    }
    (void)parse_strel(strel);
    if (thicken_passes < 0) throw ArgumentError("config: thicken passes must be >= 0");
    if (!(canny.sigma > 0.0)) throw ArgumentError("config: canny sigma must be > 0");
    if (canny.low && *canny.low < 0.0) throw ArgumentError("config: canny low must be >= 0");
    if (canny.low && canny.high && *canny.low > *canny.high) {
      throw ArgumentError("config: canny low exceeds high");
    }
    ssim.validate();
    if (histogram_bins < 1) throw ArgumentError("config: histogram bins must be >= 1");
  }
};

/// Configuration as recorded in report.json. Output location and worker
/// count are left out since they do not affect results.
inline nlohmann::ordered_json to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["resize"] = {{"width", c.resize_w},
                 {"height", c.resize_h},
                 {"kernel", c.resize_kernel == ResizeKernel::bilinear ? "bilinear" : "nearest"}};
  j["kmeans"] = {{"k", c.k},
                 {"seed", c.seed},
                 {"restarts", c.restarts},
                 {"max_iter", c.kmeans.max_iter},
                 {"tol", c.kmeans.tol},
                 {"init", c.kmeans.init == KMeansInit::plusplus ? "kmeans++" : "random"}};
  j["clahe"] = {{"alpha", c.clahe.alpha},
                {"tiles_x", c.clahe.tiles_x},
                {"tiles_y", c.clahe.tiles_y},
                {"n_bins", c.clahe.n_bins},
                {"s_max", c.clahe.s_max}};
  j["threshold"] = c.threshold.kind == Threshold::Kind::otsu
                       ? std::string("otsu")
                       : "fixed:" + std::to_string(c.threshold.level);
  j["strel"] = c.strel;
  j["thicken_passes"] = c.thicken_passes;
  nlohmann::ordered_json canny = {{"sigma", c.canny.sigma}};
  canny["low"] = c.canny.low ? nlohmann::ordered_json(*c.canny.low) : nlohmann::ordered_json(nullptr);
  canny["high"] = c.canny.high ? nlohmann::ordered_json(*c.canny.high) : nlohmann::ordered_json(nullptr);
  j["canny"] = canny;
  j["ssim"] = {{"pair", to_string(c.ssim_pair)},
               {"exp_l", c.ssim.exp_l},
               {"exp_c", c.ssim.exp_c},
               {"exp_s", c.ssim.exp_s},
               {"c1", c.ssim.c1},
               {"c2", c.ssim.c2},
               {"c3", c.ssim.c3},
               {"window", c.ssim.window},
               {"window_sigma", c.ssim.window_sigma},
               {"histogram_bins", c.histogram_bins}};
  return j;
}

/// Failure inside one pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct StageOutputs {
  RasterImage resized;
  RasterImage segmented;
  GrayImage gray;
  GrayImage clahe;
  GrayImage he;
  BinaryImage binary;
  BinaryImage morph;
  BinaryImage edges;
  RasterImage overlay;
  double ssim = 0.0;
  double kmeans_objective = 0.0;
  std::vector<StageTiming> timings;
};

/// Stage raster names, in pipeline order; each becomes <stage>.pnm.
inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"resized", "segmented", "gray",  "clahe",  "he",
                                              "binary",  "morph",     "edges", "overlay"};
  return names;
}

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename F>
  auto operator()(const char* stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record(stage, t0);
      } else {
        auto r = f();
        record(stage, t0);
        return r;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
  }

 private:
  void record(const char* stage, std::chrono::steady_clock::time_point t0) {
    const auto dt = std::chrono::steady_clock::now() - t0;
    sink_.push_back({stage, std::chrono::duration<double, std::milli>(dt).count()});
  }

  std::vector<StageTiming>& sink_;
};

}  // namespace detail

inline StageOutputs run_pipeline(const PipelineConfig& cfg, const RasterImage& img) {
  StageOutputs out;
  detail::StageClock stage(out.timings);

  stage("config", [&] { cfg.validate(); });
  out.resized = stage("resize", [&] { return resize(img, cfg.resize_w, cfg.resize_h, cfg.resize_kernel); });
  const PixelMatrix features = stage("reshape", [&] { return reshape_to_features(out.resized); });
  const ClusterModel model = stage("kmeans", [&] {
    return kmeans_best_of(features, cfg.k, cfg.seed, cfg.restarts, cfg.kmeans);
  });
  out.kmeans_objective = model.objective;
  out.segmented = stage("segment", [&] {
    return reconstruct_segmented(model, out.resized.width(), out.resized.height());
  });
  out.gray = stage("grayscale", [&] { return to_grayscale(out.segmented); });
  out.clahe = stage("clahe", [&] { return clahe(out.gray, cfg.clahe); });
  out.he = stage("he", [&] { return equalize_hist(out.clahe); });
  out.binary = stage("binarize", [&] { return binarize(out.he, cfg.threshold); });
  const Strel strel = parse_strel(cfg.strel);
  const BinaryImage opened = stage("open", [&] { return open(out.binary, strel); });
  const BinaryImage closed = stage("close", [&] { return close(opened, strel); });
  out.morph = stage("thicken", [&] { return thicken(closed, cfg.thicken_passes); });
  out.edges = stage("canny", [&] { return canny(to_gray(out.morph), cfg.canny); });
  out.overlay = stage("overlay", [&] { return overlay_edges(out.resized, out.edges, cfg.overlay_color); });
  out.ssim = stage("ssim", [&] {
    return cfg.ssim_pair == SsimPair::resized_vs_segmented
               ? ssim(to_grayscale(out.resized), out.gray, cfg.ssim)
               : ssim(out.gray, out.he, cfg.ssim);
  });
  return out;
}

inline void write_stages(const fs::path& dir, const StageOutputs& s, bool histograms) {
  fs::create_directories(dir);
  write_pnm(dir / "resized.pnm", s.resized);
  write_pnm(dir / "segmented.pnm", s.segmented);
  write_pnm(dir / "gray.pnm", s.gray);
  write_pnm(dir / "clahe.pnm", s.clahe);
  write_pnm(dir / "he.pnm", s.he);
  write_pnm(dir / "binary.pnm", s.binary);
  write_pnm(dir / "morph.pnm", s.morph);
  write_pnm(dir / "edges.pnm", s.edges);
  write_pnm(dir / "overlay.pnm", s.overlay);
  if (histograms) {
    auto emit = [&](const char* name, const GrayImage& g) {
      const std::string csv = histogram_csv(histogram(g));
      write_file(dir / name, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
    };
    emit("hist_gray.csv", s.gray);
    emit("hist_clahe.csv", s.clahe);
    emit("hist_he.csv", s.he);
  }
}

struct ImageResult {
  std::string name;
  std::optional<double> ssim;
  std::vector<StageTiming> timings;
  std::optional<std::string> error;
};

struct BatchResult {
  std::vector<ImageResult> images;  // sorted by name
  std::optional<SsimReport> report;  // absent when every image failed

  std::size_t error_count() const {
    return static_cast<std::size_t>(
        std::count_if(images.begin(), images.end(), [](const auto& r) { return r.error.has_value(); }));
  }
};

inline bool is_pnm_path(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pnm" || ext == ".ppm" || ext == ".pgm";
}

/// PNM files directly inside `dir`, sorted by file name.
inline std::vector<fs::path> list_inputs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ArgumentError("input directory does not exist: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_pnm_path(e.path())) files.push_back(e.path());
  }
  if (files.empty()) throw ArgumentError("input directory has no PNM files: " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

inline ImageResult process_file(const PipelineConfig& cfg, const fs::path& file) {
  ImageResult r;
  r.name = file.filename().string();
  try {
    RasterImage img;
    try {
      img = as_rgb(read_pnm(file));
    } catch (const std::exception& e) {
      throw StageError("decode", e.what());
    }
    const StageOutputs s = run_pipeline(cfg, img);
    r.timings = s.timings;
    try {
      write_stages(cfg.output_dir / file.stem(), s, cfg.emit_histograms);
    } catch (const std::exception& e) {
      throw StageError("write", e.what());
    }
    r.ssim = s.ssim;
  } catch (const StageError& e) {
    r.error = e.what();
  }
  return r;
}

inline nlohmann::ordered_json report_json(const PipelineConfig& cfg, const BatchResult& b) {
  nlohmann::ordered_json j;
  j["config"] = to_json(cfg);
  auto images = nlohmann::ordered_json::array();
  for (const auto& r : b.images) {
    nlohmann::ordered_json e;
    e["name"] = r.name;
    e["ssim"] = r.ssim ? nlohmann::ordered_json(*r.ssim) : nlohmann::ordered_json(nullptr);
    auto t = nlohmann::ordered_json::object();
    for (const auto& st : r.timings) t[st.stage] = st.ms;
    e["timings_ms"] = t;
    if (r.error) e["error"] = *r.error;
    images.push_back(e);
  }
  j["images"] = images;
  if (b.report) {
    j["ssim"] = {{"mean", b.report->mean},
                 {"min", b.report->min},
                 {"max", b.report->max},
                 {"histogram", {{"edges", b.report->edges}, {"counts", b.report->counts}}}};
  } else {
    j["ssim"] = nullptr;
  }
  return j;
}

inline void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

/// Processes every PNM in `input_dir`. Per-image failures are recorded, not
/// thrown; the batch always writes report.json and ssim.csv.
inline BatchResult run_batch(const PipelineConfig& cfg, const fs::path& input_dir) {
  cfg.validate();
  const auto files = list_inputs(input_dir);
  fs::create_directories(cfg.output_dir);

  BatchResult batch;
  batch.images.resize(files.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<std::size_t>(cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs) : hw);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) batch.images[i] = process_file(cfg, files[i]);
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(workers, files.size()); ++t) pool.emplace_back(work);
    work();
  }

  std::vector<double> values;
  std::vector<std::string> names;
  for (const auto& r : batch.images) {
    if (!r.ssim) continue;
    values.push_back(*r.ssim);
    names.push_back(r.name);
  }
  if (!values.empty()) batch.report = summarize_ssim(std::move(values), std::move(names), cfg.histogram_bins);

  write_text(cfg.output_dir / "report.json", report_json(cfg, batch).dump(2) + "\n");
  write_text(cfg.output_dir / "ssim.csv", batch.report ? to_csv(*batch.report) : "name,ssim\n");
  return batch;
}

struct SweepRow {
  int k = 0;
  BatchResult batch;
};

/// One batch per k in [k_lo, k_hi], each under <out>/k<k>/, plus sweep.csv.
inline std::vector<SweepRow> sweep_k(const PipelineConfig& cfg, const fs::path& input_dir, int k_lo,
                                     int k_hi) {
  if (k_lo < 1 || k_hi < k_lo) {
    throw ArgumentError("sweep-k: invalid range " + std::to_string(k_lo) + ".." + std::to_string(k_hi));
  }
  std::vector<SweepRow> rows;
  std::string csv = "k,mean,min,max,errors\n";
  for (int k = k_lo; k <= k_hi; ++k) {
    PipelineConfig c = cfg;
    c.k = k;
    c.output_dir = cfg.output_dir / ("k" + std::to_string(k));
    SweepRow row{k, run_batch(c, input_dir)};
    csv += std::to_string(k);
    if (row.batch.report) {
      csv += "," + format_real(row.batch.report->mean) + "," + format_real(row.batch.report->min) +
             "," + format_real(row.batch.report->max);
    } else {
      csv += ",,,";
    }
    csv += "," + std::to_string(row.batch.error_count()) + "\n";
    rows.push_back(std::move(row));
  }
  write_text(cfg.output_dir / "sweep.csv", csv);
  return rows;
}

using StageResult = std::variant<RasterImage, GrayImage, BinaryImage, std::string>;

inline const std::vector<std::string>& single_stage_names() {
  static const std::vector<std::string> names{
      "resize", "segment", "gray",  "clahe",   "he",    "clahe-he", "binarize", "erode",
      "dilate", "open",    "close", "thicken", "morph", "canny",    "overlay",  "histogram"};
  return names;
}

/// Runs one named stage on a decoded image for debugging. Mask-consuming
/// stages read their input as level > 127.
inline StageResult run_stage(const std::string& name, const AnyImage& input, const PipelineConfig& cfg) {
  cfg.validate();
  const auto mask = [&] { return binarize(as_gray(input), Threshold::fixed(127)); };
  const auto strel = [&] { return parse_strel(cfg.strel); };
  if (name == "resize") return resize(as_rgb(input), cfg.resize_w, cfg.resize_h, cfg.resize_kernel);
  if (name == "segment") {
    const RasterImage img = as_rgb(input);
    const auto model = kmeans_best_of(reshape_to_features(img), cfg.k, cfg.seed, cfg.restarts, cfg.kmeans);
    return reconstruct_segmented(model, img.width(), img.height());
  }
  if (name == "gray") return as_gray(input);
  if (name == "clahe") return clahe(as_gray(input), cfg.clahe);
  if (name == "he") return equalize_hist(as_gray(input));
  if (name == "clahe-he") return enhance_clahe_he(as_gray(input), cfg.clahe);
  if (name == "binarize") return binarize(as_gray(input), cfg.threshold);
  if (name == "erode") return erode(mask(), strel());
  if (name == "dilate") return dilate(mask(), strel());
  if (name == "open") return open(mask(), strel());
  if (name == "close") return close(mask(), strel());
  if (name == "thicken") return thicken(mask(), cfg.thicken_passes);
  if (name == "morph") return thicken(close(open(mask(), strel()), strel()), cfg.thicken_passes);
  if (name == "canny") return canny(as_gray(input), cfg.canny);
  if (name == "overlay") {
    return overlay_edges(as_rgb(input), canny(as_gray(input), cfg.canny), cfg.overlay_color);
  }
  if (name == "histogram") return histogram_csv(histogram(as_gray(input)));
  throw ArgumentError("unknown stage '" + name + "'");
}

}  // namespace fishseg
