#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

#include "image_io.hpp"
#include "krig/core.hpp"

namespace krig::cli {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') {
            q += '"';
        }
        q += c;
    }
    return q + '"';
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r' && c != '\n') {
            fields.back() += c;
        }
    }
    return fields;
}

double parse_real(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: " + s);
    }
    return v;
}

std::size_t parse_count(const std::string& s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a count: " + s);
    }
    return v;
}

std::string psnr_field(const QualityScore& s) { return s.psnr ? format_real(*s.psnr) : "identical"; }

QualityScore parse_score(const std::string& mse, const std::string& psnr) {
    QualityScore s;
    s.mse = parse_real(mse);
    if (psnr != "identical") {
        s.psnr = parse_real(psnr);
    }
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) {
        throw io::ImageIoError("cannot write " + path.string());
    }
}

nlohmann::json config_json(const InpaintConfig& c) {
    return {{"block_size", c.block_size}, {"margin", c.margin},   {"max_neighbors", c.max_neighbors},
            {"bin_width", c.bin_width},   {"workers", c.workers}, {"deterministic", c.deterministic}};
}

nlohmann::json score_json(const QualityScore& s) {
    nlohmann::json j{{"mse", s.mse}};
    j["psnr"] = s.psnr ? nlohmann::json(*s.psnr) : nlohmann::json("identical");
    return j;
}

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".bmp";
}

}  // namespace

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_psnr(const QualityScore& s) { return s.psnr ? fixed4(*s.psnr) + " dB" : "identical"; }

InpaintConfig resolve_config(const ConfigOverrides& o) {
    InpaintConfig cfg;
    if (o.config_file) {
        std::ifstream f(*o.config_file);
        if (!f) {
            throw io::ImageIoError("cannot open config " + o.config_file->string());
        }
        const auto j = nlohmann::json::parse(f);
        cfg.block_size = j.value("block_size", cfg.block_size);
        cfg.margin = j.value("margin", cfg.margin);
        cfg.max_neighbors = j.value("max_neighbors", cfg.max_neighbors);
        cfg.bin_width = j.value("bin_width", cfg.bin_width);
        cfg.workers = j.value("workers", cfg.workers);
        cfg.deterministic = j.value("deterministic", cfg.deterministic);
    }
    if (o.block_size) cfg.block_size = *o.block_size;
    if (o.margin) cfg.margin = *o.margin;
    if (o.max_neighbors) cfg.max_neighbors = *o.max_neighbors;
    if (o.bin_width) cfg.bin_width = *o.bin_width;
    if (o.workers) cfg.workers = *o.workers;
    cfg.validate();
    return cfg;
}

int cmd_inpaint(const InpaintOptions& opt, std::ostream& out, std::ostream& err) {
    RasterImage image;
    DamageMask mask;
    InpaintConfig cfg;
    try {
        cfg = resolve_config(opt.config);
        image = io::read_image(opt.image);
        mask = io::read_mask(opt.mask);
    } catch (const io::ImageIoError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreadable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        const auto t0 = Clock::now();
        const auto result = inpaint(image, mask, cfg);
        const double elapsed = seconds_since(t0);
        io::write_png(opt.out, result.image);
        out << "pixels_filled=" << result.report.pixels_filled << " degraded_solves=" << result.report.degraded_solves
            << " elapsed_s=" << std::fixed << std::setprecision(3) << elapsed << "\n";
    } catch (const DimensionMismatch& e) {
        err << "error: dimension mismatch: " << e.what() << "\n";
        return kShapeMismatch;
    } catch (const FullyMasked& e) {
        err << "error: " << e.what() << "\n";
        return kFullyMasked;
    } catch (const io::ImageIoError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreadable;
    }
    return kOk;
}

std::string evaluate_csv_header() { return "original,restored,mse,psnr"; }

std::string format_evaluate_row(const EvaluateRow& row) {
    return csv_quote(row.original) + "," + csv_quote(row.restored) + "," + format_real(row.score.mse) + "," +
           psnr_field(row.score);
}

EvaluateRow parse_evaluate_row(const std::string& line) {
    const auto f = csv_split(line);
    if (f.size() != 4) {
        throw std::invalid_argument("evaluate row must have 4 fields");
    }
    return {f[0], f[1], parse_score(f[2], f[3])};
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
    RasterImage original, restored;
    try {
        original = io::read_image(opt.original);
        restored = io::read_image(opt.restored);
    } catch (const io::ImageIoError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreadable;
    }
    QualityScore score;
    try {
        score = psnr(original, restored);
    } catch (const DimensionMismatch& e) {
        err << "error: " << e.what() << "\n";
        return kShapeMismatch;
    }
    out << "MSE: " << fixed4(score.mse) << "\n";
    out << "PSNR: " << format_psnr(score) << "\n";
    if (opt.csv) {
        try {
            write_text(*opt.csv, evaluate_csv_header() + "\n" +
                                     format_evaluate_row({opt.original.string(), opt.restored.string(), score}) + "\n");
        } catch (const io::ImageIoError& e) {
            err << "error: " << e.what() << "\n";
            return kUnreadable;
        }
    }
    return kOk;
}

std::string benchmark_csv_header() {
    return "image,category,coverage,damaged_mse,damaged_psnr,restored_mse,restored_psnr,masked_mse,masked_psnr,"
           "pixels_filled,degraded_solves";
}

std::string format_benchmark_row(const BenchmarkRow& r) {
    std::string s = csv_quote(r.image);
    s += ",";
    s += to_string(r.category);
    for (const std::string& f : {format_real(r.coverage), format_real(r.damaged.mse), psnr_field(r.damaged),
                                 format_real(r.restored.mse), psnr_field(r.restored), format_real(r.masked.mse),
                                 psnr_field(r.masked), std::to_string(r.pixels_filled),
                                 std::to_string(r.degraded_solves)}) {
        s += ",";
        s += f;
    }
    return s;
}

BenchmarkRow parse_benchmark_row(const std::string& line) {
    const auto f = csv_split(line);
    if (f.size() != 11) {
        throw std::invalid_argument("benchmark row must have 11 fields");
    }
    BenchmarkRow r;
    r.image = f[0];
    const auto cat = parse_mask_category(f[1]);
    if (!cat) {
        throw std::invalid_argument("unknown mask category: " + f[1]);
    }
    r.category = *cat;
    r.coverage = parse_real(f[2]);
    r.damaged = parse_score(f[3], f[4]);
    r.restored = parse_score(f[5], f[6]);
    r.masked = parse_score(f[7], f[8]);
    r.pixels_filled = parse_count(f[9]);
    r.degraded_solves = parse_count(f[10]);
    return r;
}

int cmd_benchmark(const BenchmarkOptions& opt, std::ostream& out, std::ostream& err) {
    InpaintConfig cfg;
    std::vector<fs::path> files;
    try {
        cfg = resolve_config(opt.config);
        if (!fs::is_directory(opt.corpus)) {
            throw io::ImageIoError("corpus is not a directory: " + opt.corpus.string());
        }
        for (const auto& entry : fs::directory_iterator(opt.corpus)) {
            if (entry.is_regular_file() && is_image_file(entry.path())) {
                files.push_back(entry.path());
            }
        }
    } catch (const io::ImageIoError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreadable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        err << "error: no PNG or BMP images in " << opt.corpus.string() << "\n";
        return kUnreadable;
    }

    std::error_code ec;
    fs::create_directories(opt.out, ec);
    if (ec) {
        err << "error: cannot create " << opt.out.string() << ": " << ec.message() << "\n";
        return kUnreadable;
    }

    std::vector<BenchmarkRow> rows;
    nlohmann::json manifest;
    manifest["corpus"] = opt.corpus.string();
    manifest["seed"] = opt.seed;
    manifest["config"] = config_json(cfg);
    manifest["categories"] = nlohmann::json::array();
    for (auto c : opt.categories) {
        manifest["categories"].push_back(std::string(to_string(c)));
    }
    manifest["runs"] = nlohmann::json::array();

    for (const auto& file : files) {
        RasterImage original;
        try {
            original = io::read_image(file);
        } catch (const io::ImageIoError& e) {
            err << "error: " << e.what() << "\n";
            return kUnreadable;
        }
        const std::string name = file.stem().string();
        for (auto category : opt.categories) {
            nlohmann::json run{{"image", file.string()}, {"category", std::string(to_string(category))}};
            auto t0 = Clock::now();
            DamageMask mask;
            try {
                mask = generate_mask({category, opt.seed, 0.0}, original.width(), original.height());
            } catch (const std::invalid_argument& e) {
                err << "error: " << file.string() << ": " << e.what() << "\n";
                return kShapeMismatch;
            }
            run["mask_s"] = seconds_since(t0);

            const auto damaged = apply_mask(original, mask, 0);
            t0 = Clock::now();
            const auto result = inpaint(damaged, mask, cfg);
            run["inpaint_s"] = seconds_since(t0);

            t0 = Clock::now();
            BenchmarkRow row;
            row.image = name;
            row.category = category;
            row.coverage = mask_stats(mask).coverage;
            row.damaged = psnr(original, damaged);
            row.restored = psnr(original, result.image);
            row.masked = masked_psnr(original, result.image, mask);
            row.pixels_filled = result.report.pixels_filled;
            row.degraded_solves = result.report.degraded_solves;
            run["score_s"] = seconds_since(t0);
            run["restored"] = score_json(row.restored);
            run["damaged"] = score_json(row.damaged);

            if (opt.save_images) {
                const std::string stem = name + "_" + std::string(to_string(category));
                try {
                    io::write_mask_png(opt.out / (stem + "_mask.png"), mask);
                    io::write_png(opt.out / (stem + "_damaged.png"), damaged);
                    io::write_png(opt.out / (stem + "_restored.png"), result.image);
                } catch (const io::ImageIoError& e) {
                    err << "error: " << e.what() << "\n";
                    return kUnreadable;
                }
                run["outputs"] = {stem + "_mask.png", stem + "_damaged.png", stem + "_restored.png"};
            }
            manifest["runs"].push_back(run);
            rows.push_back(row);
        }
    }

    // Long-form results, then a table with one row per image and one column per mask.
    std::string csv = benchmark_csv_header() + "\n";
    for (const auto& r : rows) {
        csv += format_benchmark_row(r) + "\n";
    }

    std::ostringstream table_csv;
    std::ostringstream table;
    table_csv << "image";
    table << std::left << std::setw(16) << "Image";
    for (auto c : opt.categories) {
        table_csv << "," << to_string(c);
        table << std::right << std::setw(15) << to_string(c);
    }
    table_csv << ",coverage\n";
    table << std::right << std::setw(10) << "coverage" << "\n";
    for (std::size_t i = 0; i < rows.size(); i += opt.categories.size()) {
        table_csv << csv_quote(rows[i].image);
        table << std::left << std::setw(16) << rows[i].image;
        double coverage = 0.0;
        for (std::size_t j = 0; j < opt.categories.size(); ++j) {
            const auto& r = rows[i + j];
            const std::string cell = r.restored.psnr ? fixed4(*r.restored.psnr) : "identical";
            table_csv << "," << cell;
            table << std::right << std::setw(15) << cell;
            coverage += r.coverage;
        }
        coverage /= static_cast<double>(opt.categories.size());
        table_csv << "," << fixed4(coverage) << "\n";
        table << std::right << std::setw(10) << fixed4(coverage) << "\n";
    }

    try {
        write_text(opt.out / "results.csv", csv);
        write_text(opt.out / "table.csv", table_csv.str());
        write_text(opt.out / "table.txt", table.str());
        manifest["outputs"] = {"results.csv", "table.csv", "table.txt", "manifest.json"};
        write_text(opt.out / "manifest.json", manifest.dump(2) + "\n");
    } catch (const io::ImageIoError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreadable;
    }
    out << table.str();
    return kOk;
}

int cmd_variogram(const VariogramOptions& opt, std::ostream& out, std::ostream& err) {
    RasterImage image;
    DamageMask mask;
    InpaintConfig cfg;
    try {
        cfg = resolve_config(opt.config);
        image = io::read_image(opt.image);
        mask = io::read_mask(opt.mask);
    } catch (const io::ImageIoError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreadable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    if (image.width() != mask.width() || image.height() != mask.height()) {
        err << "error: dimension mismatch: image is " << image.width() << "x" << image.height() << " but mask is "
            << mask.shape_string() << "\n";
        return kShapeMismatch;
    }
    const auto [grid_rows, grid_cols] = tile_grid_shape(image.width(), image.height(), cfg.block_size);
    if (opt.block_row < 0 || opt.block_col < 0 || opt.block_row >= grid_rows || opt.block_col >= grid_cols) {
        err << "error: block " << opt.block_row << "," << opt.block_col << " outside the " << grid_rows << "x"
            << grid_cols << " block grid\n";
        return kShapeMismatch;
    }
    if (opt.channel < 0 || opt.channel >= image.channels()) {
        err << "error: channel " << opt.channel << " outside image with " << image.channels() << " channels\n";
        return kShapeMismatch;
    }
    const auto blocks = tile_blocks(image.width(), image.height(), cfg.block_size, cfg.margin);
    const auto& block = blocks[static_cast<std::size_t>(opt.block_row) * grid_cols + opt.block_col];
    const auto bv = block_variogram(block, image, mask, opt.channel, cfg.bin_width);
    if (bv.known < 2) {
        err << "error: block has fewer than 2 known pixels\n";
        return kFullyMasked;
    }

    std::string csv = "lag,gamma,pair_count\n";
    for (const auto& b : bv.empirical.bins) {
        csv += format_real(b.lag) + "," + format_real(b.gamma) + "," + std::to_string(b.pairs) + "\n";
    }
    try {
        write_text(opt.out, csv);
    } catch (const io::ImageIoError& e) {
        err << "error: " << e.what() << "\n";
        return kUnreadable;
    }
    out << "block=" << opt.block_row << "," << opt.block_col << " known=" << bv.known
        << " bins=" << bv.empirical.bins.size() << "\n";
    out << "model=" << to_string(bv.model.family) << " nugget=" << format_real(bv.model.nugget)
        << " sill=" << format_real(bv.model.sill) << " range=" << format_real(bv.model.range) << "\n";
    return kOk;
}

}  // namespace krig::cli
