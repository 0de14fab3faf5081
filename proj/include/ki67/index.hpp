#pragma once

#include "ki67/segmentation.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ki67 {

/// Fraction of positive nuclei; 0 when both counts are 0.
double compute_index(std::uint64_t stained, std::uint64_t unstained) noexcept;

/// Positive pixel area over total stained-nucleus pixel area; 0 when both masks are empty.
double compute_area_index(const SegmentationResult& seg);

/// Percentage truncated (not rounded) to one decimal, e.g. 0.032746 -> "3.2%".
std::string format_percent(double fraction);

struct AnalysisReport {
    std::string image_id;
    std::uint64_t stained_count = 0;
    std::uint64_t unstained_count = 0;
    std::uint64_t stained_area = 0;
    std::uint64_t unstained_area = 0;
    double index_by_count = 0.0;
    double index_by_area = 0.0;
    std::string formatted_percent;
    bool no_cells_detected = false;
    std::string error;  // empty on success
};

/// Fills the derived fields of a report from its counts and areas.
AnalysisReport make_report(std::string image_id, std::uint64_t stained_count,
                           std::uint64_t unstained_count, std::uint64_t stained_area,
                           std::uint64_t unstained_area);

/// One published case: counts plus the printed digital and visual percentages.
struct ValidationRecord {
    int case_id = 0;
    std::uint64_t stained = 0;
    std::uint64_t unstained = 0;
    double digital_index_percent = 0.0;
    double visual_index_percent = 0.0;
};

/// The ten-case validation cohort (stained/unstained counts, digital and visual indices).
std::span<const ValidationRecord> table1_dataset() noexcept;

/// Correlation printed alongside the validation cohort.
inline constexpr double kPublishedPearsonR = 0.95127;

struct CohortSummary {
    double median_total_cells = 0.0;
    std::uint64_t min_total_cells = 0;
    std::uint64_t max_total_cells = 0;
    double min_index_percent = 0.0;
    double max_index_percent = 0.0;
    double pearson_r = 0.0;
};

/// Sample Pearson product-moment coefficient. Throws on length mismatch,
/// fewer than two samples, or a constant sequence.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Median of per-case totals (mean of middle pair for even sizes), total range,
/// digital index range, and digital-vs-visual Pearson r. Throws on empty input.
/// With a single record the correlation is undefined and reported as NaN.
CohortSummary cohort_summary(std::span<const ValidationRecord> records);

/// Formats a printed one-decimal percentage the same way format_percent does.
std::string format_printed_percent(double percent);

}  // namespace ki67
