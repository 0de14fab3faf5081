#pragma once

#include "ki67/components.hpp"
#include "ki67/index.hpp"
#include "ki67/morphology.hpp"
#include "ki67/raster.hpp"
#include "ki67/segmentation.hpp"
#include "ki67/synthgen.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ki67 {

struct RunConfig {
    StainThresholds thresholds = default_thresholds();
    StructuringElement structuring_element = StructuringElement::square(1);
    int morphology_passes = 1;
    Connectivity connectivity = Connectivity::Eight;
    std::size_t min_area = 20;
    std::size_t max_area = kUnboundedArea;
    std::filesystem::path output_dir = "ki67_out";
    bool emit_overlays = false;

    /// Throws Error(Config) if any nested setting is invalid.
    void validate() const;
};

/// Parses a JSON config document. Missing keys keep their defaults; unknown
/// keys and malformed values raise Error(Config).
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Cleaned masks and filtered components for one image.
struct ImageAnalysis {
    SegmentationResult cleaned;
    ComponentSet positive;
    ComponentSet negative;
    AnalysisReport report;
};

/// classify -> erode/dilate -> label -> area filter -> count.
ImageAnalysis analyze_image(const RasterImage& image, const RunConfig& config, std::string image_id);

/// Source image with positive component outlines in red and negative in cyan.
RasterImage render_overlay(const RasterImage& image, const ComponentSet& positive, const ComponentSet& negative);

/// Runs the pipeline over every path, in parallel, returning reports in input
/// order. A failing image yields a report with `error` set. When
/// config.emit_overlays is set, `<output_dir>/<id>_overlay.png` is written.
std::vector<AnalysisReport> analyze(const std::vector<std::filesystem::path>& images, const RunConfig& config);

inline constexpr std::string_view kReportCsvHeader =
    "image_id,stained_count,unstained_count,stained_area,unstained_area,index_by_count,index_by_area,"
    "formatted_percent,error";

std::string reports_to_csv(const std::vector<AnalysisReport>& reports);
std::string reports_to_json(const std::vector<AnalysisReport>& reports);

/// Parses a synthetic scene spec (JSON object). Unknown keys raise Error(Config).
SynthSpec parse_synth_spec(std::string_view json_text);
std::string ground_truth_to_json(const SynthSpec& spec, const GroundTruth& truth);

/// Outcome of checking the embedded validation cohort.
struct ValidationOutcome {
    int index_matches = 0;
    int cases = 0;
    bool cohort_matches = false;
    CohortSummary summary;
    std::string text;
    std::string csv;

    bool passed() const noexcept { return index_matches == cases && cohort_matches; }
};

ValidationOutcome run_validation();

}  // namespace ki67
