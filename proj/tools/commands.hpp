#pragma once

// Subcommands of the `krig` tool. Each returns the process exit code and writes
// human-readable output to `out` and diagnostics to `err`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "krig/inpaint.hpp"
#include "krig/maskgen.hpp"
#include "krig/metrics.hpp"
#include "krig/variogram.hpp"

namespace krig::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kUnreadable = 2,
    kShapeMismatch = 3,
    kFullyMasked = 4,
};

/// Flag values that override the config file, which overrides the defaults.
struct ConfigOverrides {
    std::optional<fs::path> config_file;
    std::optional<int> block_size;
    std::optional<int> margin;
    std::optional<int> max_neighbors;
    std::optional<double> bin_width;
    std::optional<unsigned> workers;
};

InpaintConfig resolve_config(const ConfigOverrides& overrides);

struct InpaintOptions {
    fs::path image;
    fs::path mask;
    fs::path out;
    ConfigOverrides config;
};

struct EvaluateOptions {
    fs::path original;
    fs::path restored;
    std::optional<fs::path> csv;
};

struct BenchmarkOptions {
    fs::path corpus;
    fs::path out;
    std::uint64_t seed = 1;
    std::vector<MaskCategory> categories{std::begin(kAllMaskCategories), std::end(kAllMaskCategories)};
    bool save_images = false;
    ConfigOverrides config;
};

struct VariogramOptions {
    fs::path image;
    fs::path mask;
    int block_row = 0;
    int block_col = 0;
    int channel = 0;
    fs::path out;
    ConfigOverrides config;
};

int cmd_inpaint(const InpaintOptions& opt, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_benchmark(const BenchmarkOptions& opt, std::ostream& out, std::ostream& err);
int cmd_variogram(const VariogramOptions& opt, std::ostream& out, std::ostream& err);

// CSV helpers shared with the tests.

struct EvaluateRow {
    std::string original;
    std::string restored;
    QualityScore score;
};

std::string evaluate_csv_header();
std::string format_evaluate_row(const EvaluateRow& row);
EvaluateRow parse_evaluate_row(const std::string& line);

struct BenchmarkRow {
    std::string image;
    MaskCategory category = MaskCategory::thin_scratch;
    double coverage = 0.0;
    QualityScore damaged;
    QualityScore restored;
    QualityScore masked;
    std::size_t pixels_filled = 0;
    std::size_t degraded_solves = 0;
};

std::string benchmark_csv_header();
std::string format_benchmark_row(const BenchmarkRow& row);
BenchmarkRow parse_benchmark_row(const std::string& line);

/// Shortest text that parses back to the identical double.
std::string format_real(double v);
std::string format_psnr(const QualityScore& s);

}  // namespace krig::cli
