#include "ki67/error.hpp"
#include "ki67/pipeline.hpp"

#include "test_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace ki67;

namespace {

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("run config defaults") {
    const RunConfig cfg = parse_run_config("{}");
    CHECK(cfg.morphology_passes == 1);
    CHECK(cfg.connectivity == Connectivity::Eight);
    CHECK(cfg.min_area == 20);
    CHECK(cfg.max_area == kUnboundedArea);
    CHECK(cfg.structuring_element.offsets().size() == 9);
    CHECK_FALSE(cfg.emit_overlays);
    CHECK(cfg.thresholds.min_saturation == 0.15);
}

TEST_CASE("run config parsing") {
    const RunConfig cfg = parse_run_config(R"({
        "thresholds": {"positive_hue": {"from": 340, "to": 40}, "negative_hue": {"from": 190, "to": 260},
                       "min_saturation": 0.2, "min_value": 0.05, "max_value": 0.9},
        "structuring_element": {"shape": "cross", "radius": 2},
        "morphology_passes": 2, "connectivity": 4, "min_area": 5, "max_area": 400,
        "output_dir": "somewhere", "emit_overlays": true})");
    CHECK(cfg.thresholds.positive_hue.from == 340.0);
    CHECK(cfg.thresholds.negative_hue.to == 260.0);
    CHECK(cfg.thresholds.min_saturation == 0.2);
    CHECK(cfg.structuring_element.offsets().size() == 9);
    CHECK(cfg.structuring_element.width() == 5);
    CHECK(cfg.morphology_passes == 2);
    CHECK(cfg.connectivity == Connectivity::Four);
    CHECK(cfg.min_area == 5);
    CHECK(cfg.max_area == 400);
    CHECK(cfg.output_dir == "somewhere");
    CHECK(cfg.emit_overlays);

    const RunConfig m = parse_run_config(R"({"structuring_element": {"matrix": [[0,1,0],[1,1,1],[0,1,0]]},
                                            "max_area": null})");
    CHECK(m.structuring_element.offsets().size() == 5);
    CHECK(m.max_area == kUnboundedArea);
}

TEST_CASE("run config rejects bad documents") {
    CHECK(code_of([] { parse_run_config(R"({"min_aera": 3})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"thresholds": {"min_sat": 0.1}})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"thresholds": {"positive_hue": {"from": 1, "to": 2, "x": 3}}})"); }) ==
          ErrorCode::Config);
    CHECK(code_of([] { parse_run_config("{not json"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config("[]"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"connectivity": 6})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"connectivity": "8"})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"min_area": 50, "max_area": 10})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"morphology_passes": -1})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"structuring_element": {"shape": "disk"}})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"structuring_element": {"matrix": [[1,1]]}})"); }) == ErrorCode::Config);
    CHECK(code_of([] {
              parse_run_config(R"({"thresholds": {"negative_hue": {"from": 10, "to": 60}}})");
          }) == ErrorCode::Config);
    CHECK(code_of([] { parse_run_config(R"({"emit_overlays": 1})"); }) == ErrorCode::Config);
    CHECK(code_of([] { load_run_config("/nonexistent/config.json"); }) == ErrorCode::Io);
}

TEST_CASE("single image analysis recovers synthetic counts") {
    SynthSpec spec;
    spec.positive_count = 5;
    spec.negative_count = 7;
    spec.jitter = 10;
    spec.seed = 555;
    const GroundTruth gt = generate(spec);
    const ImageAnalysis a = analyze_image(gt.image, RunConfig{}, "five_seven");
    CHECK(a.report.stained_count == 5);
    CHECK(a.report.unstained_count == 7);
    CHECK(a.report.formatted_percent == "41.6%");
    CHECK(a.report.stained_area > 0);
    CHECK(a.report.stained_area <= gt.positive_mask.popcount());
    CHECK(a.report.error.empty());

    const ImageAnalysis blank = analyze_image(RasterImage(50, 50, Rgb{255, 255, 255}), RunConfig{}, "blank");
    CHECK(blank.report.no_cells_detected);
    CHECK(blank.report.formatted_percent == "0.0%");
}

TEST_CASE("batch analysis with reports and overlays") {
    const auto dir = scratch_dir("pipeline_batch");
    SynthSpec spec;
    spec.positive_count = 3;
    spec.negative_count = 9;
    spec.seed = 9;
    const GroundTruth gt = generate(spec);
    save_image(gt.image, dir / "good.png");
    std::ofstream(dir / "broken.png") << "garbage";

    RunConfig cfg;
    cfg.output_dir = dir / "out";
    cfg.emit_overlays = true;
    const std::vector<std::filesystem::path> inputs{dir / "good.png", dir / "missing.png", dir / "broken.png",
                                                    dir / "good.png"};
    const auto reports = analyze(inputs, cfg);
    REQUIRE(reports.size() == 4);
    CHECK(reports[0].image_id == "good");
    CHECK(reports[0].stained_count == 3);
    CHECK(reports[0].unstained_count == 9);
    CHECK(reports[0].formatted_percent == "25.0%");
    CHECK_FALSE(reports[1].error.empty());
    CHECK_FALSE(reports[2].error.empty());
    CHECK(reports[3].stained_count == 3);

    const std::string csv = reports_to_csv(reports);
    CHECK(csv.rfind(std::string(kReportCsvHeader) + "\n", 0) == 0);
    CHECK(line_count(csv) == 1 + inputs.size());
    CHECK(csv.find("good,3,9,") != std::string::npos);
    CHECK(csv.find(",0.250000,") != std::string::npos);

    const auto doc = nlohmann::json::parse(reports_to_json(reports));
    REQUIRE(doc.size() == 4);
    CHECK(doc[0]["stained_count"] == 3);
    CHECK(doc[0]["index_by_count"] == 0.25);
    CHECK(doc[0]["error"].is_null());
    CHECK(doc[1]["error"].is_string());

    // identical inputs give byte-identical reports
    const auto again = analyze(inputs, cfg);
    CHECK(reports_to_csv(again) == csv);
    CHECK(reports_to_json(again) == reports_to_json(reports));

    const RasterImage overlay = load_image(cfg.output_dir / "good_overlay.png");
    CHECK(overlay.width() == gt.image.width());
    CHECK(overlay.height() == gt.image.height());
    CHECK(std::count(overlay.pixels().begin(), overlay.pixels().end(), Rgb{255, 0, 0}) > 0);
    CHECK(std::count(overlay.pixels().begin(), overlay.pixels().end(), Rgb{0, 255, 255}) > 0);

    CHECK(analyze({}, cfg).empty());
}

TEST_CASE("csv escaping of error text") {
    AnalysisReport r;
    r.image_id = "a,b";
    r.error = "bad \"thing\", really";
    const std::string csv = reports_to_csv({r});
    CHECK(csv.find("\"a,b\"") != std::string::npos);
    CHECK(csv.find("\"bad \"\"thing\"\", really\"") != std::string::npos);
}

TEST_CASE("synth spec parsing and sidecar") {
    const SynthSpec spec = parse_synth_spec(R"({"width": 120, "height": 90, "positive_count": 2,
        "negative_count": 3, "radius_range": {"min": 4, "max": 6}, "positive_color": [150, 80, 40],
        "jitter": 5, "seed": 18446744073709551615})");
    CHECK(spec.width == 120);
    CHECK(spec.min_radius == 4);
    CHECK(spec.max_radius == 6);
    CHECK(spec.positive_color == Rgb{150, 80, 40});
    CHECK(spec.seed == 18446744073709551615ULL);

    const GroundTruth gt = generate(spec);
    const auto doc = nlohmann::json::parse(ground_truth_to_json(spec, gt));
    CHECK(doc["positive_count"] == 2);
    CHECK(doc["negative_count"] == 3);
    CHECK(doc["disks"].size() == 5);
    CHECK(doc["expected_percent"] == "40.0%");
    CHECK(doc["positive_area"] == gt.positive_mask.popcount());

    CHECK(code_of([] { parse_synth_spec(R"({"widht": 5})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_synth_spec(R"({"positive_color": [1, 2]})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_synth_spec(R"({"radius_range": {"min": 1, "max": 2}})"); }) == ErrorCode::Config);
    CHECK(code_of([] { parse_synth_spec(R"({"seed": -4})"); }) == ErrorCode::Config);
}

TEST_CASE("validation report") {
    const ValidationOutcome v = run_validation();
    CHECK(v.passed());
    CHECK(v.index_matches == 10);
    CHECK(v.summary.median_total_cells == 2449.0);
    CHECK(v.text.find("index matches: 10/10") != std::string::npos);
    CHECK(v.text.find("0.95127") != std::string::npos);
    CHECK(v.csv.rfind("item,computed,printed,match,delta\n", 0) == 0);
    CHECK(v.csv.find("case_8,3.2%,3.2%,true") != std::string::npos);
    CHECK(v.csv.find("pearson_r,0.977263298387") != std::string::npos);
}
