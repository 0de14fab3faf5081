#include "ki67/ki67.h"

#include "ki67/error.hpp"
#include "ki67/pipeline.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

struct ki67_image {
    ki67::RasterImage image;
};

struct ki67_config {
    ki67::RunConfig config;
};

struct ki67_batch {
    std::vector<ki67::AnalysisReport> reports;
};

namespace {

thread_local std::string g_last_error;

ki67_status fail(ki67_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

ki67_status to_status(ki67::ErrorCode code) {
    switch (code) {
        case ki67::ErrorCode::InvalidArgument: return KI67_ERR_INVALID_ARGUMENT;
        case ki67::ErrorCode::Io: return KI67_ERR_IO;
        case ki67::ErrorCode::Format: return KI67_ERR_FORMAT;
        case ki67::ErrorCode::Config: return KI67_ERR_CONFIG;
        case ki67::ErrorCode::Placement: return KI67_ERR_PLACEMENT;
    }
    return KI67_ERR_INTERNAL;
}

// Runs `body` and converts any exception into a status code.
template <typename F>
ki67_status guarded(F&& body) noexcept {
    try {
        body();
        return KI67_OK;
    } catch (const ki67::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(KI67_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(KI67_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(KI67_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(KI67_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool condition, const char* message) {
    if (!condition) {
        throw ki67::Error(ki67::ErrorCode::InvalidArgument, message);
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw ki67::Error(ki67::ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
}

}  // namespace

extern "C" {

const char* ki67_version(void) { return "1.0.0"; }

const char* ki67_last_error(void) { return g_last_error.c_str(); }

const char* ki67_status_name(ki67_status status) {
    switch (status) {
        case KI67_OK: return "ok";
        case KI67_ERR_INVALID_ARGUMENT: return "invalid argument";
        case KI67_ERR_IO: return "i/o error";
        case KI67_ERR_FORMAT: return "unsupported format";
        case KI67_ERR_CONFIG: return "configuration error";
        case KI67_ERR_PLACEMENT: return "placement failure";
        case KI67_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void ki67_string_free(char* s) { std::free(s); }

ki67_status ki67_image_load(const char* path, ki67_image** out) {
    return guarded([&] {
        require(path && out, "ki67_image_load: null argument");
        *out = new ki67_image{ki67::load_image(path)};
    });
}

ki67_status ki67_image_save(const ki67_image* image, const char* path) {
    return guarded([&] {
        require(image && path, "ki67_image_save: null argument");
        ki67::save_image(image->image, path);
    });
}

int ki67_image_width(const ki67_image* image) { return image ? image->image.width() : 0; }
int ki67_image_height(const ki67_image* image) { return image ? image->image.height() : 0; }
void ki67_image_free(ki67_image* image) { delete image; }

ki67_status ki67_config_create_default(ki67_config** out) {
    return guarded([&] {
        require(out, "ki67_config_create_default: null argument");
        *out = new ki67_config{};
    });
}

ki67_status ki67_config_parse(const char* json_text, ki67_config** out) {
    return guarded([&] {
        require(json_text && out, "ki67_config_parse: null argument");
        *out = new ki67_config{ki67::parse_run_config(json_text)};
    });
}

ki67_status ki67_config_load(const char* path, ki67_config** out) {
    return guarded([&] {
        require(path && out, "ki67_config_load: null argument");
        *out = new ki67_config{ki67::load_run_config(path)};
    });
}

ki67_status ki67_config_set_output_dir(ki67_config* config, const char* dir) {
    return guarded([&] {
        require(config && dir, "ki67_config_set_output_dir: null argument");
        config->config.output_dir = dir;
    });
}

ki67_status ki67_config_set_emit_overlays(ki67_config* config, int enabled) {
    return guarded([&] {
        require(config, "ki67_config_set_emit_overlays: null argument");
        config->config.emit_overlays = enabled != 0;
    });
}

ki67_status ki67_config_set_connectivity(ki67_config* config, int connectivity) {
    return guarded([&] {
        require(config, "ki67_config_set_connectivity: null argument");
        if (connectivity != 4 && connectivity != 8) {
            throw ki67::Error(ki67::ErrorCode::Config, "connectivity must be 4 or 8");
        }
        config->config.connectivity = static_cast<ki67::Connectivity>(connectivity);
    });
}

ki67_status ki67_config_set_min_area(ki67_config* config, uint64_t min_area) {
    return guarded([&] {
        require(config, "ki67_config_set_min_area: null argument");
        ki67::RunConfig next = config->config;
        next.min_area = static_cast<std::size_t>(min_area);
        next.validate();
        config->config = std::move(next);
    });
}

ki67_status ki67_config_set_max_area(ki67_config* config, int64_t max_area) {
    return guarded([&] {
        require(config, "ki67_config_set_max_area: null argument");
        ki67::RunConfig next = config->config;
        next.max_area = max_area < 0 ? ki67::kUnboundedArea : static_cast<std::size_t>(max_area);
        next.validate();
        config->config = std::move(next);
    });
}

ki67_status ki67_config_set_morphology_passes(ki67_config* config, int passes) {
    return guarded([&] {
        require(config, "ki67_config_set_morphology_passes: null argument");
        if (passes < 0) {
            throw ki67::Error(ki67::ErrorCode::Config, "morphology_passes must be >= 0");
        }
        config->config.morphology_passes = passes;
    });
}

ki67_status ki67_config_output_dir(const ki67_config* config, char** out) {
    return guarded([&] {
        require(config && out, "ki67_config_output_dir: null argument");
        *out = dup_string(config->config.output_dir.string());
    });
}

void ki67_config_free(ki67_config* config) { delete config; }

ki67_status ki67_analyze_image(const ki67_image* image, const ki67_config* config, const char* image_id,
                               ki67_batch** out) {
    return guarded([&] {
        require(image && config && out, "ki67_analyze_image: null argument");
        auto batch = std::make_unique<ki67_batch>();
        batch->reports.push_back(
            ki67::analyze_image(image->image, config->config, image_id ? image_id : "image").report);
        *out = batch.release();
    });
}

ki67_status ki67_analyze(const ki67_config* config, const char* const* paths, size_t count, ki67_batch** out) {
    return guarded([&] {
        require(config && out && (paths || count == 0), "ki67_analyze: null argument");
        std::vector<std::filesystem::path> images;
        for (size_t i = 0; i < count; ++i) {
            require(paths[i], "ki67_analyze: null path");
            images.emplace_back(paths[i]);
        }
        auto batch = std::make_unique<ki67_batch>();
        batch->reports = ki67::analyze(images, config->config);
        *out = batch.release();
    });
}

size_t ki67_batch_size(const ki67_batch* batch) { return batch ? batch->reports.size() : 0; }

size_t ki67_batch_failures(const ki67_batch* batch) {
    size_t n = 0;
    if (batch) {
        for (const auto& r : batch->reports) {
            n += r.error.empty() ? 0 : 1;
        }
    }
    return n;
}

ki67_status ki67_batch_get(const ki67_batch* batch, size_t index, ki67_report* out) {
    return guarded([&] {
        require(batch && out, "ki67_batch_get: null argument");
        require(index < batch->reports.size(), "ki67_batch_get: index out of range");
        const auto& r = batch->reports[index];
        *out = ki67_report{r.image_id.c_str(),  r.stained_count,         r.unstained_count,
                           r.stained_area,      r.unstained_area,        r.index_by_count,
                           r.index_by_area,     r.formatted_percent.c_str(), r.no_cells_detected ? 1 : 0,
                           r.error.empty() ? nullptr : r.error.c_str()};
    });
}

ki67_status ki67_batch_csv(const ki67_batch* batch, char** out) {
    return guarded([&] {
        require(batch && out, "ki67_batch_csv: null argument");
        *out = dup_string(ki67::reports_to_csv(batch->reports));
    });
}

ki67_status ki67_batch_json(const ki67_batch* batch, char** out) {
    return guarded([&] {
        require(batch && out, "ki67_batch_json: null argument");
        *out = dup_string(ki67::reports_to_json(batch->reports));
    });
}

ki67_status ki67_batch_write(const ki67_batch* batch, const char* dir) {
    return guarded([&] {
        require(batch && dir, "ki67_batch_write: null argument");
        const std::filesystem::path root(dir);
        std::filesystem::create_directories(root);
        write_text(root / "report.csv", ki67::reports_to_csv(batch->reports));
        write_text(root / "report.json", ki67::reports_to_json(batch->reports));
    });
}

void ki67_batch_free(ki67_batch* batch) { delete batch; }

double ki67_compute_index(uint64_t stained, uint64_t unstained) { return ki67::compute_index(stained, unstained); }

ki67_status ki67_format_percent(double fraction, char* buf, size_t buf_size) {
    return guarded([&] {
        require(buf, "ki67_format_percent: null buffer");
        const std::string s = ki67::format_percent(fraction);
        require(s.size() < buf_size, "ki67_format_percent: buffer too small");
        std::memcpy(buf, s.c_str(), s.size() + 1);
    });
}

ki67_status ki67_pearson_r(const double* xs, const double* ys, size_t count, double* out) {
    return guarded([&] {
        require(xs && ys && out, "ki67_pearson_r: null argument");
        *out = ki67::pearson_r({xs, count}, {ys, count});
    });
}

ki67_status ki67_validate(int* passed, double* pearson_r, char** text, char** csv) {
    return guarded([&] {
        const ki67::ValidationOutcome outcome = ki67::run_validation();
        if (passed) *passed = outcome.passed() ? 1 : 0;
        if (pearson_r) *pearson_r = outcome.summary.pearson_r;
        std::unique_ptr<char, decltype(&std::free)> text_copy(text ? dup_string(outcome.text) : nullptr, &std::free);
        if (csv) *csv = dup_string(outcome.csv);
        if (text) *text = text_copy.release();
    });
}

ki67_status ki67_synth_file(const char* spec_path, const char* out_dir, char** image_path, char** truth_path) {
    return guarded([&] {
        require(spec_path && out_dir, "ki67_synth_file: null argument");
        const std::filesystem::path spec_file(spec_path);
        std::ifstream in(spec_file, std::ios::binary);
        if (!in) {
            throw ki67::Error(ki67::ErrorCode::Io, "cannot open spec '" + spec_file.string() + "'");
        }
        const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const ki67::SynthSpec spec = ki67::parse_synth_spec(text);
        const ki67::GroundTruth truth = ki67::generate(spec);

        const std::filesystem::path root(out_dir);
        std::filesystem::create_directories(root);
        const std::string stem = spec_file.stem().string();
        const auto image_file = root / (stem + ".png");
        const auto truth_file = root / (stem + ".truth.json");
        ki67::save_image(truth.image, image_file);
        write_text(truth_file, ki67::ground_truth_to_json(spec, truth));

        std::unique_ptr<char, decltype(&std::free)> image_copy(image_path ? dup_string(image_file.string()) : nullptr,
                                                               &std::free);
        if (truth_path) *truth_path = dup_string(truth_file.string());
        if (image_path) *image_path = image_copy.release();
    });
}

}  // extern "C"
