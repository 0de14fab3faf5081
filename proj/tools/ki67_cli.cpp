// Command-line driver. Talks to the library only through the C interface.

#include "ki67/ki67.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct ConfigDeleter {
    void operator()(ki67_config* c) const { ki67_config_free(c); }
};
struct BatchDeleter {
    void operator()(ki67_batch* b) const { ki67_batch_free(b); }
};
struct StringDeleter {
    void operator()(char* s) const { ki67_string_free(s); }
};
using ConfigPtr = std::unique_ptr<ki67_config, ConfigDeleter>;
using BatchPtr = std::unique_ptr<ki67_batch, BatchDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int report_error(const char* context, ki67_status status) {
    std::cerr << "ki67 " << context << ": " << ki67_status_name(status) << ": " << ki67_last_error() << "\n";
    return status == KI67_ERR_CONFIG ? kExitConfig : kExitFailure;
}

struct AnalyzeOptions {
    std::vector<std::string> images;
    std::string config_path;
    std::optional<std::string> out_dir;
    bool overlays = false;
    std::optional<int> connectivity;
    std::optional<std::uint64_t> min_area;
    std::optional<std::int64_t> max_area;
    std::optional<int> passes;
};

int run_analyze(const AnalyzeOptions& opt) {
    ki67_config* raw = nullptr;
    ki67_status st = opt.config_path.empty() ? ki67_config_create_default(&raw)
                                             : ki67_config_load(opt.config_path.c_str(), &raw);
    if (st != KI67_OK) {
        // A missing or malformed config file is a configuration problem either way.
        report_error("config", st);
        return kExitConfig;
    }
    ConfigPtr config(raw);

    // Flags override the file.
    if (opt.out_dir) st = ki67_config_set_output_dir(config.get(), opt.out_dir->c_str());
    if (st == KI67_OK && opt.overlays) st = ki67_config_set_emit_overlays(config.get(), 1);
    if (st == KI67_OK && opt.connectivity) st = ki67_config_set_connectivity(config.get(), *opt.connectivity);
    if (st == KI67_OK && opt.passes) st = ki67_config_set_morphology_passes(config.get(), *opt.passes);
    if (st == KI67_OK && opt.min_area) st = ki67_config_set_min_area(config.get(), *opt.min_area);
    if (st == KI67_OK && opt.max_area) st = ki67_config_set_max_area(config.get(), *opt.max_area);
    if (st != KI67_OK) {
        report_error("config", st);
        return kExitConfig;
    }

    std::vector<const char*> paths;
    for (const auto& p : opt.images) {
        paths.push_back(p.c_str());
    }
    ki67_batch* batch_raw = nullptr;
    st = ki67_analyze(config.get(), paths.data(), paths.size(), &batch_raw);
    if (st != KI67_OK) {
        return report_error("analyze", st);
    }
    BatchPtr batch(batch_raw);

    char* dir_raw = nullptr;
    if ((st = ki67_config_output_dir(config.get(), &dir_raw)) != KI67_OK) {
        return report_error("analyze", st);
    }
    StringPtr dir(dir_raw);
    if ((st = ki67_batch_write(batch.get(), dir.get())) != KI67_OK) {
        return report_error("write report", st);
    }

    for (std::size_t i = 0; i < ki67_batch_size(batch.get()); ++i) {
        ki67_report r{};
        ki67_batch_get(batch.get(), i, &r);
        if (r.error) {
            std::cerr << r.image_id << ": FAILED: " << r.error << "\n";
        } else {
            std::cout << r.image_id << ": " << r.stained_count << " stained, " << r.unstained_count
                      << " unstained, Ki-67 index " << r.formatted_percent
                      << (r.no_cells_detected ? " (no cells detected)" : "") << "\n";
        }
    }
    std::cout << "reports written to " << dir.get() << "/report.csv and report.json\n";
    return ki67_batch_failures(batch.get()) == 0 ? kExitOk : kExitFailure;
}

int run_validate(const std::string& csv_path) {
    int passed = 0;
    char* text_raw = nullptr;
    char* csv_raw = nullptr;
    const ki67_status st = ki67_validate(&passed, nullptr, &text_raw, &csv_raw);
    if (st != KI67_OK) {
        return report_error("validate", st);
    }
    StringPtr text(text_raw);
    StringPtr csv(csv_raw);
    std::cout << text.get();
    if (!csv_path.empty()) {
        std::ofstream out(csv_path, std::ios::binary);
        out << csv.get();
        if (!out) {
            std::cerr << "ki67 validate: cannot write " << csv_path << "\n";
            return kExitFailure;
        }
    }
    return passed ? kExitOk : kExitFailure;
}

int run_synth(const std::string& spec, const std::string& out_dir) {
    char* image_raw = nullptr;
    char* truth_raw = nullptr;
    const ki67_status st = ki67_synth_file(spec.c_str(), out_dir.c_str(), &image_raw, &truth_raw);
    if (st != KI67_OK) {
        return report_error("synth", st);
    }
    StringPtr image(image_raw);
    StringPtr truth(truth_raw);
    std::cout << "wrote " << image.get() << "\n" << "wrote " << truth.get() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ki-67 proliferation index from IHC micrographs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ki67_version());

    AnalyzeOptions analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Count stained/unstained nuclei and compute the Ki-67 index");
    analyze_cmd->add_option("images", analyze.images, "PNG images to analyze");
    analyze_cmd->add_option("--config", analyze.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    analyze_cmd->add_option("--out", analyze.out_dir, "Output directory (overrides config output_dir)");
    analyze_cmd->add_flag("--overlays", analyze.overlays, "Write component outline overlays");
    analyze_cmd->add_option("--connectivity", analyze.connectivity, "4 or 8");
    analyze_cmd->add_option("--min-area", analyze.min_area, "Minimum nucleus area in pixels");
    analyze_cmd->add_option("--max-area", analyze.max_area, "Maximum nucleus area in pixels (negative: unbounded)");
    analyze_cmd->add_option("--passes", analyze.passes, "Erosion/dilation passes");

    std::string csv_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check the embedded ten-case validation cohort");
    validate_cmd->add_option("--csv", csv_path, "Also write the comparison as CSV to this file");

    std::string spec_path;
    std::string synth_out = ".";
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic stained image with ground truth");
    synth_cmd->add_option("spec", spec_path, "JSON scene spec")->required();
    synth_cmd->add_option("--out", synth_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*analyze_cmd) return run_analyze(analyze);
    if (*validate_cmd) return run_validate(csv_path);
    return run_synth(spec_path, synth_out);
}
