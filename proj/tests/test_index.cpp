#include "ki67/error.hpp"
#include "ki67/index.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ki67;

TEST_CASE("count index and percent formatting") {
    CHECK(compute_index(77, 1883) == doctest::Approx(77.0 / 1960.0));
    CHECK(format_percent(compute_index(77, 1883)) == "3.9%");
    CHECK(format_percent(compute_index(80, 2363)) == "3.2%");   // rounding would give 3.3%
    CHECK(format_percent(compute_index(9, 2329)) == "0.3%");    // rounding would give 0.4%
    CHECK(format_percent(compute_index(282, 2600)) == "9.7%");  // rounding would give 9.8%
    CHECK(compute_index(0, 1000) == 0.0);
    CHECK(format_percent(0.0) == "0.0%");
    CHECK(format_percent(0.5) == "50.0%");
    CHECK(format_percent(1.0) == "100.0%");
    CHECK(format_percent(0.171) == "17.1%");
    CHECK(format_percent(5.0 / 12.0) == "41.6%");
    CHECK(compute_index(0, 0) == 0.0);
    CHECK_THROWS_AS(format_percent(1.5), Error);
    CHECK_THROWS_AS(format_percent(-0.1), Error);
    CHECK_THROWS_AS(format_percent(std::nan("")), Error);
}

TEST_CASE("count index is scale invariant") {
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> n(0, 5000);
    std::uniform_int_distribution<int> k(1, 1000);
    for (int i = 0; i < 500; ++i) {
        const std::uint64_t s = n(rng);
        const std::uint64_t u = n(rng) + 1;
        const std::uint64_t f = k(rng);
        REQUIRE(compute_index(f * s, f * u) == doctest::Approx(compute_index(s, u)).epsilon(1e-15));
        REQUIRE(format_percent(compute_index(f * s, f * u)) == format_percent(compute_index(s, u)));
    }
}

TEST_CASE("area index") {
    SegmentationResult seg{BinaryMask(4, 4), BinaryMask(4, 4)};
    CHECK(compute_area_index(seg) == 0.0);
    seg.negative.set(0, 0, true);
    CHECK(compute_area_index(seg) == 0.0);
    // complementary halves of a region
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            seg.positive.set(r, c, c < 2);
            seg.negative.set(r, c, c >= 2);
        }
    CHECK(compute_area_index(seg) == 0.5);
    SegmentationResult bad{BinaryMask(4, 4), BinaryMask(3, 4)};
    CHECK_THROWS_AS(compute_area_index(bad), Error);
}

TEST_CASE("area index equals count index for single-pixel nuclei") {
    SegmentationResult seg{BinaryMask(10, 10), BinaryMask(10, 10)};
    // isolated pixels on a checkerboard of stride 2
    int pos = 0;
    int neg = 0;
    for (int r = 0; r < 10; r += 2)
        for (int c = 0; c < 10; c += 2) {
            if ((r + c) % 4 == 0) {
                seg.positive.set(r, c, true);
                ++pos;
            } else {
                seg.negative.set(r, c, true);
                ++neg;
            }
        }
    CHECK(compute_area_index(seg) == compute_index(pos, neg));
}

TEST_CASE("report fields") {
    const AnalysisReport r = make_report("x", 5, 7, 120, 480);
    CHECK(r.index_by_count == doctest::Approx(5.0 / 12.0));
    CHECK(r.index_by_area == 0.2);
    CHECK(r.formatted_percent == "41.6%");
    CHECK_FALSE(r.no_cells_detected);
    const AnalysisReport blank = make_report("blank", 0, 0, 0, 0);
    CHECK(blank.no_cells_detected);
    CHECK(blank.index_by_count == 0.0);
    CHECK(blank.formatted_percent == "0.0%");
}

TEST_CASE("embedded validation cohort") {
    const auto rows = table1_dataset();
    REQUIRE(rows.size() == 10);
    CHECK(rows[4].case_id == 5);
    CHECK(rows[4].stained == 771);
    CHECK(rows[4].unstained == 1534);
    CHECK(rows[4].digital_index_percent == 33.4);
    CHECK(rows[4].visual_index_percent == 40.0);
    for (const auto& rec : rows) {
        CAPTURE(rec.case_id);
        CHECK(format_percent(compute_index(rec.stained, rec.unstained)) ==
              format_printed_percent(rec.digital_index_percent));
    }
    // Rounding instead of truncation breaks cases 8, 9 and 10.
    int rounding_mismatches = 0;
    for (const auto& rec : rows) {
        const double pct = 100.0 * compute_index(rec.stained, rec.unstained);
        if (std::llround(pct * 10.0) != std::llround(rec.digital_index_percent * 10.0)) ++rounding_mismatches;
    }
    CHECK(rounding_mismatches == 3);
}

TEST_CASE("cohort summary") {
    const CohortSummary s = cohort_summary(table1_dataset());
    CHECK(s.median_total_cells == 2449.0);
    CHECK(s.min_total_cells == 1161);
    CHECK(s.max_total_cells == 2882);
    CHECK(format_printed_percent(s.min_index_percent) == "0.3%");
    CHECK(format_printed_percent(s.max_index_percent) == "33.4%");
    CHECK(s.min_total_cells <= s.median_total_cells);
    CHECK(s.median_total_cells <= s.max_total_cells);

    const ValidationRecord one[] = {{1, 10, 90, 10.0, 12.0}};
    const CohortSummary single = cohort_summary(one);
    CHECK(single.median_total_cells == 100.0);
    CHECK(single.min_total_cells == 100);
    CHECK(single.max_total_cells == 100);
    CHECK(std::isnan(single.pearson_r));

    const ValidationRecord three[] = {{1, 1, 9, 10.0, 1.0}, {2, 1, 99, 1.0, 2.0}, {3, 1, 999, 0.1, 3.0}};
    CHECK(cohort_summary(three).median_total_cells == 100.0);

    CHECK_THROWS_AS(cohort_summary({}), Error);
}

TEST_CASE("pearson r") {
    const std::vector<double> xs{1.0, 2.0, 4.0, 7.0, 11.0};
    std::vector<double> neg;
    for (double x : xs) neg.push_back(-x);
    CHECK(pearson_r(xs, xs) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson_r(xs, neg) == doctest::Approx(-1.0).epsilon(1e-15));
    const std::vector<double> ys{2.0, 1.0, 5.0, 6.0, 9.0};
    CHECK(std::abs(pearson_r(xs, ys) - oracle::pearson_two_pass(xs, ys)) < 1e-12);

    CHECK_THROWS_AS(pearson_r(xs, std::vector<double>{1.0, 2.0}), Error);
    CHECK_THROWS_AS(pearson_r(std::vector<double>{1.0}, std::vector<double>{2.0}), Error);
    CHECK_THROWS_AS(pearson_r(xs, std::vector<double>(5, 3.0)), Error);
}

TEST_CASE("pearson r affine invariance") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> scale(0.1, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(8);
        std::vector<double> y(8);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = u(rng);
            y[i] = 0.5 * x[i] + u(rng);
        }
        const double base = pearson_r(x, y);
        const double a = scale(rng);
        const double b = u(rng);
        std::vector<double> pos(x.size());
        std::vector<double> neg(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            pos[i] = a * x[i] + b;
            neg[i] = -a * x[i] + b;
        }
        REQUIRE(std::abs(pearson_r(pos, y) - base) < 1e-12);
        REQUIRE(std::abs(pearson_r(neg, y) + base) < 1e-12);
    }
}
