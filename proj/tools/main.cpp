#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

namespace {

void add_config_flags(CLI::App* cmd, krig::cli::ConfigOverrides& o) {
    cmd->add_option("--config", o.config_file, "JSON config file (flags override it)");
    cmd->add_option("--block-size", o.block_size, "Block side k in pixels (default 8)");
    cmd->add_option("--margin", o.margin, "Context border in pixels (default 4)");
    cmd->add_option("--max-neighbors", o.max_neighbors, "Known pixels per Kriging solve (default 64)");
    cmd->add_option("--bin-width", o.bin_width, "Variogram lag bin width (default 1)");
    cmd->add_option("--workers", o.workers, "Worker threads, 0 = hardware threads (default 1)");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace krig::cli;
    CLI::App app{"Block-wise ordinary Kriging image inpainting"};
    app.require_subcommand(1);

    InpaintOptions inpaint_opt;
    auto* inpaint = app.add_subcommand("inpaint", "Restore the masked pixels of an image");
    inpaint->add_option("--image", inpaint_opt.image, "Damaged image (PNG or BMP)")->required();
    inpaint->add_option("--mask", inpaint_opt.mask, "Mask image, nonzero = damaged")->required();
    inpaint->add_option("--out", inpaint_opt.out, "Restored PNG")->required();
    add_config_flags(inpaint, inpaint_opt.config);

    EvaluateOptions eval_opt;
    auto* evaluate = app.add_subcommand("evaluate", "MSE and PSNR of a restoration");
    evaluate->add_option("--original", eval_opt.original, "Reference image")->required();
    evaluate->add_option("--restored", eval_opt.restored, "Restored image")->required();
    evaluate->add_option("--csv", eval_opt.csv, "Also write the score as a CSV row");

    BenchmarkOptions bench_opt;
    std::string categories;
    auto* bench = app.add_subcommand("benchmark", "Mask, damage, restore and score every image in a corpus");
    bench->add_option("--corpus", bench_opt.corpus, "Directory of PNG/BMP images")->required();
    bench->add_option("--out", bench_opt.out, "Output directory")->required();
    bench->add_option("--seed", bench_opt.seed, "Mask seed")->required();
    bench->add_option("--categories", categories,
                      "Comma-separated subset of thick_scratch,thin_scratch,low_text,heavy_text");
    bench->add_flag("--save-images", bench_opt.save_images, "Also write masks, damaged and restored images");
    add_config_flags(bench, bench_opt.config);

    VariogramOptions vario_opt;
    std::string block;
    auto* vario = app.add_subcommand("variogram", "Dump the empirical variogram and fitted model of one block");
    vario->add_option("--image", vario_opt.image, "Image (PNG or BMP)")->required();
    vario->add_option("--mask", vario_opt.mask, "Mask image, nonzero = damaged")->required();
    vario->add_option("--block", block, "Block grid coordinate ROW,COL")->required();
    vario->add_option("--channel", vario_opt.channel, "Channel (default 0)");
    vario->add_option("--out", vario_opt.out, "CSV output path")->required();
    add_config_flags(vario, vario_opt.config);

    CLI11_PARSE(app, argc, argv);

    if (*inpaint) {
        return cmd_inpaint(inpaint_opt, std::cout, std::cerr);
    }
    if (*evaluate) {
        return cmd_evaluate(eval_opt, std::cout, std::cerr);
    }
    if (*bench) {
        if (!categories.empty()) {
            bench_opt.categories.clear();
            std::stringstream ss(categories);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto c = krig::parse_mask_category(item);
                if (!c) {
                    std::cerr << "error: unknown mask category '" << item << "'\n";
                    return kUsage;
                }
                bench_opt.categories.push_back(*c);
            }
        }
        return cmd_benchmark(bench_opt, std::cout, std::cerr);
    }
    if (*vario) {
        const auto comma = block.find(',');
        try {
            if (comma == std::string::npos) {
                throw std::invalid_argument(block);
            }
            vario_opt.block_row = std::stoi(block.substr(0, comma));
            vario_opt.block_col = std::stoi(block.substr(comma + 1));
        } catch (const std::exception&) {
            std::cerr << "error: --block expects ROW,COL\n";
            return kUsage;
        }
        return cmd_variogram(vario_opt, std::cout, std::cerr);
    }
    return kUsage;
}
