#pragma once

// Command-line front end: `run`, `sweep-k` and `stage` subcommands.

#include <charconv>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "fishseg/pipeline.hpp"

namespace fishseg {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { run, sweep_k, stage, help };

struct CliOptions {
  Command command = Command::help;
  std::string input;
  std::string output;
  std::string stage;
  int k_lo = 2;
  int k_hi = 9;
  PipelineConfig config;
  std::string help;
};

namespace detail {

inline int to_int(std::string_view s, const std::string& token) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw UsageError("malformed value '" + token + "'");
  }
  return v;
}

// "<a><sep><b>" with integer parts.
inline std::pair<int, int> split_pair(const std::string& token, std::string_view sep) {
  const auto at = token.find(sep);
  if (at == std::string::npos) throw UsageError("malformed value '" + token + "'");
  return {to_int(std::string_view(token).substr(0, at), token),
          to_int(std::string_view(token).substr(at + sep.size()), token)};
}

}  // namespace detail

/// Parses argv into a command plus pipeline configuration. Unknown flags and
/// malformed values raise UsageError naming the offending token.
inline CliOptions parse_cli(const std::vector<std::string>& args) {
  CliOptions opts;
  PipelineConfig& cfg = opts.config;

  CLI::App app{"Fish segmentation pipeline: k-means, CLAHE/HE, morphology, Canny, SSIM", "fishseg"};
  app.require_subcommand(1);

  std::string resize, clahe_tiles, threshold, k_range = "2..9", ssim_pair;
  std::optional<double> canny_low, canny_high;
  bool strict_strel = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.k, "cluster count")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "k-means seed");
    sub->add_option("--restarts", cfg.restarts, "k-means restarts")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cfg.kmeans.max_iter, "k-means iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.kmeans.tol, "k-means objective tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--resize", resize, "working size WxH");
    sub->add_flag_function(
        "--nearest", [&](std::int64_t) { cfg.resize_kernel = ResizeKernel::nearest; },
        "nearest-neighbor resize");
    sub->add_option("--clahe-alpha", cfg.clahe.alpha, "CLAHE clip factor")->check(CLI::Range(0.0, 100.0));
    sub->add_option("--clahe-tiles", clahe_tiles, "CLAHE tile grid TXxTY");
    sub->add_option("--clahe-smax", cfg.clahe.s_max, "CLAHE maximum slope");
    sub->add_option("--threshold", threshold, "otsu or fixed:T");
    sub->add_option("--strel", cfg.strel, "line:<len>:<angle>, box:<w>x<h> or single");
    sub->add_flag("--strict-paper-strel", strict_strel, "use the literal line:1:45 element");
    sub->add_option("--thicken", cfg.thicken_passes, "thicken passes")->check(CLI::NonNegativeNumber);
    sub->add_option("--canny-sigma", cfg.canny.sigma, "Gaussian sigma")->check(CLI::PositiveNumber);
    sub->add_option("--canny-low", canny_low, "absolute low threshold")->check(CLI::NonNegativeNumber);
    sub->add_option("--canny-high", canny_high, "absolute high threshold")->check(CLI::NonNegativeNumber);
    sub->add_option("--ssim-pair", ssim_pair, "resized-gray:segmented-gray or gray:enhanced");
    sub->add_flag("--emit-histograms", cfg.emit_histograms, "write level histograms per image");
    sub->add_option("--jobs", cfg.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  };

  auto* run = app.add_subcommand("run", "process every PNM in a directory");
  run->add_option("input", opts.input, "input directory")->required();
  run->add_option("output", opts.output, "output directory")->required();
  add_common(run);

  auto* sweep = app.add_subcommand("sweep-k", "run the batch once per k");
  sweep->add_option("input", opts.input, "input directory")->required();
  sweep->add_option("output", opts.output, "output directory")->required();
  sweep->add_option("--k-range", k_range, "inclusive range lo..hi");
  add_common(sweep);

  auto* stage = app.add_subcommand("stage", "run a single stage on one file");
  stage->add_option("name", opts.stage, "stage name")
      ->required()
      ->check(CLI::IsMember(single_stage_names()));
  stage->add_option("input", opts.input, "input PNM")->required();
  stage->add_option("output", opts.output, "output file")->required();
  add_common(stage);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    opts.help = app.help();
    return opts;
  } catch (const CLI::CallForAllHelp&) {
    opts.help = app.help("", CLI::AppFormatMode::All);
    return opts;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (run->parsed()) opts.command = Command::run;
  if (sweep->parsed()) opts.command = Command::sweep_k;
  if (stage->parsed()) opts.command = Command::stage;

  if (!resize.empty()) std::tie(cfg.resize_w, cfg.resize_h) = detail::split_pair(resize, "x");
  if (!clahe_tiles.empty()) std::tie(cfg.clahe.tiles_x, cfg.clahe.tiles_y) = detail::split_pair(clahe_tiles, "x");
  if (!threshold.empty()) {
    if (threshold == "otsu") {
      cfg.threshold = Threshold::otsu();
    } else if (threshold.starts_with("fixed:")) {
      cfg.threshold = Threshold::fixed(detail::to_int(std::string_view(threshold).substr(6), threshold));
    } else {
      throw UsageError("malformed value '" + threshold + "'");
    }
  }
  if (strict_strel) cfg.strel = kLiteralStrel;
  if (canny_low) cfg.canny.low = canny_low;
  if (canny_high) cfg.canny.high = canny_high;
  if (!ssim_pair.empty()) {
    if (ssim_pair == "resized-gray:segmented-gray") {
      cfg.ssim_pair = SsimPair::resized_vs_segmented;
    } else if (ssim_pair == "gray:enhanced") {
      cfg.ssim_pair = SsimPair::gray_vs_enhanced;
    } else {
      throw UsageError("malformed value '" + ssim_pair + "'");
    }
  }
  if (opts.command == Command::sweep_k) {
    std::tie(opts.k_lo, opts.k_hi) = detail::split_pair(k_range, "..");
    if (opts.k_lo < 1 || opts.k_hi < opts.k_lo) throw UsageError("malformed value '" + k_range + "'");
  }
  cfg.output_dir = opts.output;

  try {
    cfg.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  return opts;
}

}  // namespace fishseg
