#include "ki67/index.hpp"

#include "ki67/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ki67 {

double compute_index(std::uint64_t stained, std::uint64_t unstained) noexcept {
    const std::uint64_t total = stained + unstained;
    if (total == 0) {
        return 0.0;
    }
    return static_cast<double>(stained) / static_cast<double>(total);
}

double compute_area_index(const SegmentationResult& seg) {
    if (seg.positive.width() != seg.negative.width() || seg.positive.height() != seg.negative.height()) {
        throw Error(ErrorCode::InvalidArgument, "segmentation masks differ in size");
    }
    return compute_index(seg.positive.popcount(), seg.negative.popcount());
}

namespace {

std::string tenths_to_percent(long long tenths) {
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

}  // namespace

std::string format_percent(double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fraction must lie in [0, 1]");
    }
    // The tiny bias keeps exact decimal fractions such as 0.171 from landing
    // one ulp below their tenth and truncating to the previous digit.
    const auto tenths = static_cast<long long>(std::floor(fraction * 1000.0 + 1e-9));
    return tenths_to_percent(tenths);
}

std::string format_printed_percent(double percent) {
    return tenths_to_percent(std::llround(percent * 10.0));
}

AnalysisReport make_report(std::string image_id, std::uint64_t stained_count,
                           std::uint64_t unstained_count, std::uint64_t stained_area,
                           std::uint64_t unstained_area) {
    AnalysisReport r;
    r.image_id = std::move(image_id);
    r.stained_count = stained_count;
    r.unstained_count = unstained_count;
    r.stained_area = stained_area;
    r.unstained_area = unstained_area;
    r.index_by_count = compute_index(stained_count, unstained_count);
    r.index_by_area = compute_index(stained_area, unstained_area);
    r.formatted_percent = format_percent(r.index_by_count);
    r.no_cells_detected = stained_count + unstained_count == 0;
    return r;
}

namespace {

constexpr ValidationRecord kTable1[] = {
    {1, 77, 1883, 3.9, 5.0},    {2, 240, 2473, 8.8, 7.5},  {3, 471, 2278, 17.1, 25.0},
    {4, 442, 2013, 18.0, 24.0}, {5, 771, 1534, 33.4, 40.0}, {6, 79, 1082, 6.8, 7.5},
    {7, 189, 2631, 6.7, 7.5},   {8, 80, 2363, 3.2, 5.0},   {9, 9, 2329, 0.3, 3.0},
    {10, 282, 2600, 9.7, 7.5},
};

}  // namespace

std::span<const ValidationRecord> table1_dataset() noexcept { return kTable1; }

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw Error(ErrorCode::InvalidArgument, "pearson_r: sequences differ in length");
    }
    if (xs.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "pearson_r: need at least two samples");
    }
    const double n = static_cast<double>(xs.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;

    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "pearson_r: correlation undefined for a constant sequence");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CohortSummary cohort_summary(std::span<const ValidationRecord> records) {
    if (records.empty()) {
        throw Error(ErrorCode::InvalidArgument, "cohort_summary: no records");
    }
    std::vector<std::uint64_t> totals;
    std::vector<double> digital;
    std::vector<double> visual;
    for (const auto& rec : records) {
        totals.push_back(rec.stained + rec.unstained);
        digital.push_back(rec.digital_index_percent);
        visual.push_back(rec.visual_index_percent);
    }
    std::sort(totals.begin(), totals.end());

    CohortSummary s;
    const std::size_t n = totals.size();
    s.median_total_cells = n % 2 == 1 ? static_cast<double>(totals[n / 2])
                                      : (static_cast<double>(totals[n / 2 - 1]) + static_cast<double>(totals[n / 2])) / 2.0;
    s.min_total_cells = totals.front();
    s.max_total_cells = totals.back();
    const auto [lo, hi] = std::minmax_element(digital.begin(), digital.end());
    s.min_index_percent = *lo;
    s.max_index_percent = *hi;
    s.pearson_r = n >= 2 ? pearson_r(digital, visual) : std::numeric_limits<double>::quiet_NaN();
    return s;
}

}  // namespace ki67
