#include "ki67/ki67.h"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace {

std::string take(char* s) {
    std::string out = s ? s : "";
    ki67_string_free(s);
    return out;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("c api: index helpers") {
    CHECK(ki67_compute_index(77, 1883) == doctest::Approx(77.0 / 1960.0));
    char buf[16];
    REQUIRE(ki67_format_percent(ki67_compute_index(9, 2329), buf, sizeof buf) == KI67_OK);
    CHECK(std::string(buf) == "0.3%");
    char tiny[3];
    CHECK(ki67_format_percent(0.5, tiny, sizeof tiny) == KI67_ERR_INVALID_ARGUMENT);
    CHECK(std::string(ki67_last_error()).find("buffer") != std::string::npos);
    CHECK(ki67_format_percent(2.0, buf, sizeof buf) == KI67_ERR_INVALID_ARGUMENT);

    const double xs[] = {1, 2, 3, 4};
    const double ys[] = {2, 4, 6, 8};
    double r = 0;
    REQUIRE(ki67_pearson_r(xs, ys, 4, &r) == KI67_OK);
    CHECK(r == doctest::Approx(1.0));
    const double flat[] = {1, 1, 1, 1};
    CHECK(ki67_pearson_r(xs, flat, 4, &r) == KI67_ERR_INVALID_ARGUMENT);
    CHECK(ki67_pearson_r(nullptr, ys, 4, &r) == KI67_ERR_INVALID_ARGUMENT);
}

TEST_CASE("c api: config handling") {
    ki67_config* cfg = nullptr;
    CHECK(ki67_config_parse(R"({"connectivty": 8})", &cfg) == KI67_ERR_CONFIG);
    CHECK(std::string(ki67_last_error()).find("connectivty") != std::string::npos);
    CHECK(cfg == nullptr);
    CHECK(ki67_config_load("/does/not/exist.json", &cfg) == KI67_ERR_IO);

    REQUIRE(ki67_config_parse(R"({"output_dir": "abc", "min_area": 30})", &cfg) == KI67_OK);
    CHECK(ki67_config_set_connectivity(cfg, 5) == KI67_ERR_CONFIG);
    CHECK(ki67_config_set_max_area(cfg, 10) == KI67_ERR_CONFIG);  // below min_area
    CHECK(ki67_config_set_max_area(cfg, -1) == KI67_OK);
    CHECK(ki67_config_set_morphology_passes(cfg, -2) == KI67_ERR_CONFIG);
    char* dir = nullptr;
    REQUIRE(ki67_config_output_dir(cfg, &dir) == KI67_OK);
    CHECK(take(dir) == "abc");
    REQUIRE(ki67_config_set_output_dir(cfg, "xyz") == KI67_OK);
    REQUIRE(ki67_config_output_dir(cfg, &dir) == KI67_OK);
    CHECK(take(dir) == "xyz");
    ki67_config_free(cfg);
}

TEST_CASE("c api: synth, analyze, report") {
    const auto dir = scratch_dir("capi");
    write(dir / "scene.json", R"({"width": 200, "height": 160, "positive_count": 6, "negative_count": 10,
                                  "jitter": 12, "seed": 4})");
    char* image_path = nullptr;
    char* truth_path = nullptr;
    REQUIRE(ki67_synth_file((dir / "scene.json").c_str(), (dir / "gen").c_str(), &image_path, &truth_path) ==
            KI67_OK);
    const std::string image = take(image_path);
    const std::string truth = take(truth_path);
    CHECK(image == (dir / "gen" / "scene.png").string());
    CHECK(std::filesystem::exists(truth));

    ki67_image* img = nullptr;
    REQUIRE(ki67_image_load(image.c_str(), &img) == KI67_OK);
    CHECK(ki67_image_width(img) == 200);
    CHECK(ki67_image_height(img) == 160);
    REQUIRE(ki67_image_save(img, (dir / "copy.png").c_str()) == KI67_OK);

    ki67_config* cfg = nullptr;
    REQUIRE(ki67_config_create_default(&cfg) == KI67_OK);

    ki67_batch* single = nullptr;
    REQUIRE(ki67_analyze_image(img, cfg, "scene", &single) == KI67_OK);
    ki67_report rep{};
    REQUIRE(ki67_batch_get(single, 0, &rep) == KI67_OK);
    CHECK(rep.stained_count == 6);
    CHECK(rep.unstained_count == 10);
    CHECK(std::string(rep.formatted_percent) == "37.5%");
    CHECK(rep.error == nullptr);
    CHECK(ki67_batch_get(single, 1, &rep) == KI67_ERR_INVALID_ARGUMENT);
    ki67_batch_free(single);
    ki67_image_free(img);

    const std::string missing = (dir / "missing.png").string();
    const std::string copy = (dir / "copy.png").string();
    const char* paths[] = {image.c_str(), missing.c_str(), copy.c_str()};
    ki67_batch* batch = nullptr;
    REQUIRE(ki67_analyze(cfg, paths, 3, &batch) == KI67_OK);
    CHECK(ki67_batch_size(batch) == 3);
    CHECK(ki67_batch_failures(batch) == 1);
    REQUIRE(ki67_batch_get(batch, 1, &rep) == KI67_OK);
    CHECK(rep.error != nullptr);
    CHECK(std::string(rep.image_id) == "missing");

    char* csv = nullptr;
    REQUIRE(ki67_batch_csv(batch, &csv) == KI67_OK);
    const std::string csv_text = take(csv);
    CHECK(csv_text.rfind("image_id,stained_count,unstained_count,stained_area,unstained_area,index_by_count,"
                         "index_by_area,formatted_percent,error\n",
                         0) == 0);
    char* js = nullptr;
    REQUIRE(ki67_batch_json(batch, &js) == KI67_OK);
    CHECK(take(js).find("\"formatted_percent\": \"37.5%\"") != std::string::npos);

    REQUIRE(ki67_batch_write(batch, (dir / "report").c_str()) == KI67_OK);
    CHECK(std::filesystem::exists(dir / "report" / "report.csv"));
    CHECK(std::filesystem::exists(dir / "report" / "report.json"));
    ki67_batch_free(batch);

    ki67_batch* empty = nullptr;
    REQUIRE(ki67_analyze(cfg, nullptr, 0, &empty) == KI67_OK);
    CHECK(ki67_batch_size(empty) == 0);
    ki67_batch_free(empty);
    ki67_config_free(cfg);
}

TEST_CASE("c api: error statuses") {
    const auto dir = scratch_dir("capi_err");
    ki67_image* img = nullptr;
    CHECK(ki67_image_load((dir / "nothing.png").c_str(), &img) == KI67_ERR_IO);
    CHECK(ki67_image_load(nullptr, &img) == KI67_ERR_INVALID_ARGUMENT);

    write(dir / "dense.json", R"({"width": 50, "height": 50, "positive_count": 100, "seed": 3})");
    CHECK(ki67_synth_file((dir / "dense.json").c_str(), dir.c_str(), nullptr, nullptr) == KI67_ERR_PLACEMENT);
    CHECK(std::string(ki67_last_error()).find("placement failed") != std::string::npos);

    write(dir / "typo.json", R"({"positive_cout": 3})");
    CHECK(ki67_synth_file((dir / "typo.json").c_str(), dir.c_str(), nullptr, nullptr) == KI67_ERR_CONFIG);

    CHECK(std::string(ki67_status_name(KI67_ERR_PLACEMENT)) == "placement failure");
}

TEST_CASE("c api: validation") {
    int passed = 0;
    double r = 0;
    char* text = nullptr;
    char* csv = nullptr;
    REQUIRE(ki67_validate(&passed, &r, &text, &csv) == KI67_OK);
    CHECK(passed == 1);
    CHECK(std::abs(r - 0.977263298387339) < 1e-9);
    CHECK(take(text).find("validation PASSED") != std::string::npos);
    CHECK(take(csv).find("case_10,9.7%,9.7%,true") != std::string::npos);
    REQUIRE(ki67_validate(&passed, nullptr, nullptr, nullptr) == KI67_OK);
}
