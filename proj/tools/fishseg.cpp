#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "fishseg/cli.hpp"

namespace {

int report_batch(const fishseg::BatchResult& b) {
  for (const auto& r : b.images) {
    if (r.error) std::cerr << r.name << ": " << *r.error << "\n";
  }
  if (b.report) {
    std::cout << "images: " << b.images.size() << "  errors: " << b.error_count()
              << "  ssim mean " << b.report->mean << "  min " << b.report->min << "  max "
              << b.report->max << "\n";
  } else {
    std::cout << "images: " << b.images.size() << "  errors: " << b.error_count() << "\n";
  }
  return b.error_count() == 0 ? 0 : 1;
}

int run_stage(const fishseg::CliOptions& opts) {
  const auto input = fishseg::read_pnm(opts.input);
  const auto result = fishseg::run_stage(opts.stage, input, opts.config);
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, std::string>) {
          fishseg::write_text(opts.output, r);
        } else {
          fishseg::write_pnm(opts.output, r);
        }
      },
      result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  fishseg::CliOptions opts;
  try {
    opts = fishseg::parse_cli(args);
  } catch (const fishseg::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n"
              << "run `fishseg --help` for the list of commands and flags\n";
    return 2;
  }
  if (!opts.help.empty()) {
    std::cout << opts.help;
    return 0;
  }

  try {
    switch (opts.command) {
      case fishseg::Command::run:
        return report_batch(fishseg::run_batch(opts.config, opts.input));
      case fishseg::Command::sweep_k: {
        int code = 0;
        for (const auto& row : fishseg::sweep_k(opts.config, opts.input, opts.k_lo, opts.k_hi)) {
          std::cout << "k=" << row.k << "  ";
          code |= report_batch(row.batch);
        }
        return code;
      }
      case fishseg::Command::stage:
        return run_stage(opts);
      case fishseg::Command::help:
        break;
    }
  } catch (const fishseg::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
