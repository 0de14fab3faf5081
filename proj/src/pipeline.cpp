#include "ki67/pipeline.hpp"

#include "ki67/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <thread>

namespace ki67 {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void RunConfig::validate() const {
    thresholds.validate();
    if (morphology_passes < 0) {
        throw Error(ErrorCode::Config, "morphology_passes must be >= 0");
    }
    if (connectivity != Connectivity::Four && connectivity != Connectivity::Eight) {
        throw Error(ErrorCode::Config, "connectivity must be 4 or 8");
    }
    if (max_area < min_area) {
        throw Error(ErrorCode::Config, "max_area must be >= min_area");
    }
}

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw Error(ErrorCode::Config, where + ": expected a JSON object");
    }
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw Error(ErrorCode::Config, where + ": unknown key '" + item.key() + "'");
        }
    }
}

double get_number(const json& v, const std::string& name) {
    if (!v.is_number()) {
        throw Error(ErrorCode::Config, name + " must be a number");
    }
    return v.get<double>();
}

long long get_integer(const json& v, const std::string& name) {
    if (!v.is_number_integer()) {
        throw Error(ErrorCode::Config, name + " must be an integer");
    }
    return v.get<long long>();
}

HueRange parse_hue_range(const json& v, const std::string& name) {
    reject_unknown_keys(v, {"from", "to"}, name);
    if (!v.contains("from") || !v.contains("to")) {
        throw Error(ErrorCode::Config, name + " needs 'from' and 'to'");
    }
    return {get_number(v["from"], name + ".from"), get_number(v["to"], name + ".to")};
}

StainThresholds parse_thresholds(const json& v) {
    reject_unknown_keys(v, {"positive_hue", "negative_hue", "min_saturation", "min_value", "max_value"},
                        "thresholds");
    StainThresholds t = default_thresholds();
    if (v.contains("positive_hue")) t.positive_hue = parse_hue_range(v["positive_hue"], "thresholds.positive_hue");
    if (v.contains("negative_hue")) t.negative_hue = parse_hue_range(v["negative_hue"], "thresholds.negative_hue");
    if (v.contains("min_saturation")) t.min_saturation = get_number(v["min_saturation"], "thresholds.min_saturation");
    if (v.contains("min_value")) t.min_value = get_number(v["min_value"], "thresholds.min_value");
    if (v.contains("max_value")) t.max_value = get_number(v["max_value"], "thresholds.max_value");
    return t;
}

StructuringElement parse_structuring_element(const json& v) {
    reject_unknown_keys(v, {"shape", "radius", "matrix"}, "structuring_element");
    if (v.contains("matrix")) {
        if (v.contains("shape") || v.contains("radius")) {
            throw Error(ErrorCode::Config, "structuring_element: give either 'matrix' or 'shape'/'radius'");
        }
        const json& m = v["matrix"];
        if (!m.is_array()) {
            throw Error(ErrorCode::Config, "structuring_element.matrix must be an array of rows");
        }
        std::vector<std::vector<int>> rows;
        for (const auto& row : m) {
            if (!row.is_array()) {
                throw Error(ErrorCode::Config, "structuring_element.matrix rows must be arrays");
            }
            auto& out = rows.emplace_back();
            for (const auto& cell : row) {
                out.push_back(static_cast<int>(get_integer(cell, "structuring_element.matrix cell")));
            }
        }
        return StructuringElement(rows);
    }
    const std::string shape = v.value("shape", std::string("square"));
    const long long radius = v.contains("radius") ? get_integer(v["radius"], "structuring_element.radius") : 1;
    if (radius < 0 || radius > 64) {
        throw Error(ErrorCode::Config, "structuring_element.radius must lie in [0, 64]");
    }
    if (shape == "square") {
        return StructuringElement::square(static_cast<int>(radius));
    }
    if (shape == "cross") {
        return StructuringElement::cross(static_cast<int>(radius));
    }
    throw Error(ErrorCode::Config, "structuring_element.shape must be \"square\" or \"cross\"");
}

json parse_document(std::string_view text, const std::string& what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Config, what + ": " + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
    const json doc = parse_document(json_text, "config");
    reject_unknown_keys(doc,
                        {"thresholds", "structuring_element", "morphology_passes", "connectivity", "min_area",
                         "max_area", "output_dir", "emit_overlays"},
                        "config");
    RunConfig cfg;
    try {
        if (doc.contains("thresholds")) cfg.thresholds = parse_thresholds(doc["thresholds"]);
        if (doc.contains("structuring_element")) {
            cfg.structuring_element = parse_structuring_element(doc["structuring_element"]);
        }
        if (doc.contains("morphology_passes")) {
            cfg.morphology_passes = static_cast<int>(get_integer(doc["morphology_passes"], "morphology_passes"));
        }
        if (doc.contains("connectivity")) {
            const long long c = get_integer(doc["connectivity"], "connectivity");
            if (c != 4 && c != 8) {
                throw Error(ErrorCode::Config, "connectivity must be 4 or 8");
            }
            cfg.connectivity = static_cast<Connectivity>(c);
        }
        if (doc.contains("min_area")) {
            const long long a = get_integer(doc["min_area"], "min_area");
            if (a < 0) throw Error(ErrorCode::Config, "min_area must be >= 0");
            cfg.min_area = static_cast<std::size_t>(a);
        }
        if (doc.contains("max_area") && !doc["max_area"].is_null()) {
            const long long a = get_integer(doc["max_area"], "max_area");
            if (a < 0) throw Error(ErrorCode::Config, "max_area must be >= 0");
            cfg.max_area = static_cast<std::size_t>(a);
        }
        if (doc.contains("output_dir")) {
            if (!doc["output_dir"].is_string()) throw Error(ErrorCode::Config, "output_dir must be a string");
            cfg.output_dir = doc["output_dir"].get<std::string>();
        }
        if (doc.contains("emit_overlays")) {
            if (!doc["emit_overlays"].is_boolean()) throw Error(ErrorCode::Config, "emit_overlays must be a boolean");
            cfg.emit_overlays = doc["emit_overlays"].get<bool>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_file(path));
}

ImageAnalysis analyze_image(const RasterImage& image, const RunConfig& config, std::string image_id) {
    config.validate();
    SegmentationResult seg = classify_pixels(image, config.thresholds);
    ImageAnalysis out{
        {clean_mask(seg.positive, config.structuring_element, config.morphology_passes),
         clean_mask(seg.negative, config.structuring_element, config.morphology_passes)},
        {},
        {},
        {}};
    out.positive = filter_by_area(label_components(out.cleaned.positive, config.connectivity), config.min_area,
                                  config.max_area);
    out.negative = filter_by_area(label_components(out.cleaned.negative, config.connectivity), config.min_area,
                                  config.max_area);
    auto area = [](const ComponentSet& cs) {
        std::uint64_t total = 0;
        for (const auto& c : cs.components) total += c.area;
        return total;
    };
    out.report = make_report(std::move(image_id), count(out.positive), count(out.negative), area(out.positive),
                             area(out.negative));
    return out;
}

RasterImage render_overlay(const RasterImage& image, const ComponentSet& positive, const ComponentSet& negative) {
    RasterImage out = image;
    auto outline = [&out](const ComponentSet& cs, Rgb color) {
        for (int r = 0; r < cs.height; ++r) {
            for (int c = 0; c < cs.width; ++c) {
                const std::uint32_t id = cs.label_at(r, c);
                if (!id) {
                    continue;
                }
                const bool edge = r == 0 || c == 0 || r + 1 == cs.height || c + 1 == cs.width ||
                                  cs.label_at(r - 1, c) != id || cs.label_at(r + 1, c) != id ||
                                  cs.label_at(r, c - 1) != id || cs.label_at(r, c + 1) != id;
                if (edge) {
                    out.at(r, c) = color;
                }
            }
        }
    };
    outline(positive, Rgb{255, 0, 0});
    outline(negative, Rgb{0, 255, 255});
    return out;
}

std::vector<AnalysisReport> analyze(const std::vector<std::filesystem::path>& images, const RunConfig& config) {
    config.validate();
    std::vector<AnalysisReport> reports(images.size());
    if (images.empty()) {
        return reports;
    }
    if (config.emit_overlays) {
        std::filesystem::create_directories(config.output_dir);
    }

    auto process = [&](std::size_t i) {
        const std::string id = images[i].stem().string();
        try {
            const RasterImage image = load_image(images[i]);
            ImageAnalysis result = analyze_image(image, config, id);
            if (config.emit_overlays) {
                save_image(render_overlay(image, result.positive, result.negative),
                           config.output_dir / (id + "_overlay.png"));
            }
            reports[i] = std::move(result.report);
        } catch (const std::exception& e) {
            AnalysisReport failed;
            failed.image_id = id;
            failed.error = e.what();
            reports[i] = std::move(failed);
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(images.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < images.size(); i = next++) {
                process(i);
            }
        });
    }
    pool.clear();
    return reports;
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string reports_to_csv(const std::vector<AnalysisReport>& reports) {
    std::string out(kReportCsvHeader);
    out += '\n';
    for (const auto& r : reports) {
        const bool ok = r.error.empty();
        out += csv_field(r.image_id) + ',';
        out += (ok ? std::to_string(r.stained_count) : "") + ',';
        out += (ok ? std::to_string(r.unstained_count) : "") + ',';
        out += (ok ? std::to_string(r.stained_area) : "") + ',';
        out += (ok ? std::to_string(r.unstained_area) : "") + ',';
        out += (ok ? fixed6(r.index_by_count) : "") + ',';
        out += (ok ? fixed6(r.index_by_area) : "") + ',';
        out += csv_field(r.formatted_percent) + ',';
        out += csv_field(r.error) + '\n';
    }
    return out;
}

std::string reports_to_json(const std::vector<AnalysisReport>& reports) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json o;
        o["image_id"] = r.image_id;
        if (r.error.empty()) {
            o["stained_count"] = r.stained_count;
            o["unstained_count"] = r.unstained_count;
            o["stained_area"] = r.stained_area;
            o["unstained_area"] = r.unstained_area;
            o["index_by_count"] = round6(r.index_by_count);
            o["index_by_area"] = round6(r.index_by_area);
            o["formatted_percent"] = r.formatted_percent;
            o["no_cells_detected"] = r.no_cells_detected;
            o["error"] = nullptr;
        } else {
            o["error"] = r.error;
        }
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

namespace {

Rgb parse_rgb(const json& v, const std::string& name) {
    if (!v.is_array() || v.size() != 3) {
        throw Error(ErrorCode::Config, name + " must be an [r, g, b] array");
    }
    Rgb c;
    std::uint8_t* channels[] = {&c.r, &c.g, &c.b};
    for (int i = 0; i < 3; ++i) {
        const long long x = get_integer(v[i], name);
        if (x < 0 || x > 255) {
            throw Error(ErrorCode::Config, name + " channels must lie in [0, 255]");
        }
        *channels[i] = static_cast<std::uint8_t>(x);
    }
    return c;
}

int parse_int_field(const json& doc, const char* key, int fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    const long long v = get_integer(doc[key], key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw Error(ErrorCode::Config, std::string(key) + " out of range");
    }
    return static_cast<int>(v);
}

}  // namespace

SynthSpec parse_synth_spec(std::string_view json_text) {
    const json doc = parse_document(json_text, "synth spec");
    reject_unknown_keys(doc,
                        {"width", "height", "positive_count", "negative_count", "radius_range", "positive_color",
                         "negative_color", "background_color", "jitter", "seed"},
                        "synth spec");
    SynthSpec spec;
    spec.width = parse_int_field(doc, "width", spec.width);
    spec.height = parse_int_field(doc, "height", spec.height);
    spec.positive_count = parse_int_field(doc, "positive_count", spec.positive_count);
    spec.negative_count = parse_int_field(doc, "negative_count", spec.negative_count);
    spec.jitter = parse_int_field(doc, "jitter", spec.jitter);
    if (doc.contains("radius_range")) {
        const json& rr = doc["radius_range"];
        reject_unknown_keys(rr, {"min", "max"}, "synth spec radius_range");
        spec.min_radius = parse_int_field(rr, "min", spec.min_radius);
        spec.max_radius = parse_int_field(rr, "max", spec.max_radius);
    }
    if (doc.contains("positive_color")) spec.positive_color = parse_rgb(doc["positive_color"], "positive_color");
    if (doc.contains("negative_color")) spec.negative_color = parse_rgb(doc["negative_color"], "negative_color");
    if (doc.contains("background_color")) spec.background_color = parse_rgb(doc["background_color"], "background_color");
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            throw Error(ErrorCode::Config, "seed must be a non-negative integer");
        }
        spec.seed = s.get<std::uint64_t>();
    }
    try {
        validate(spec);
    } catch (const Error& e) {
        throw Error(ErrorCode::Config, e.what());
    }
    return spec;
}

std::string ground_truth_to_json(const SynthSpec& spec, const GroundTruth& truth) {
    std::uint64_t positive_area = 0;
    std::uint64_t negative_area = 0;
    ordered_json disks = ordered_json::array();
    for (const auto& d : truth.disks) {
        (d.positive ? positive_area : negative_area) += d.area;
        ordered_json o;
        o["class"] = d.positive ? "positive" : "negative";
        o["center_row"] = d.center_row;
        o["center_col"] = d.center_col;
        o["radius"] = d.radius;
        o["area"] = d.area;
        disks.push_back(std::move(o));
    }
    ordered_json doc;
    doc["width"] = spec.width;
    doc["height"] = spec.height;
    doc["seed"] = spec.seed;
    doc["positive_count"] = truth.positive_count;
    doc["negative_count"] = truth.negative_count;
    doc["positive_area"] = positive_area;
    doc["negative_area"] = negative_area;
    doc["expected_index"] = round6(truth.expected_index());
    doc["expected_percent"] = format_percent(truth.expected_index());
    doc["disks"] = std::move(disks);
    return doc.dump(2) + "\n";
}

ValidationOutcome run_validation() {
    ValidationOutcome out;
    const auto records = table1_dataset();
    out.cases = static_cast<int>(records.size());

    std::ostringstream text;
    std::string csv = "item,computed,printed,match,delta\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-5s %8s %10s %10s %10s %6s\n", "case", "stained", "unstained", "computed",
                  "printed", "match");
    text << line;
    for (const auto& rec : records) {
        const std::string computed = format_percent(compute_index(rec.stained, rec.unstained));
        const std::string printed = format_printed_percent(rec.digital_index_percent);
        const bool match = computed == printed;
        out.index_matches += match ? 1 : 0;
        std::snprintf(line, sizeof line, "%-5d %8llu %10llu %10s %10s %6s\n", rec.case_id,
                      static_cast<unsigned long long>(rec.stained), static_cast<unsigned long long>(rec.unstained),
                      computed.c_str(), printed.c_str(), match ? "yes" : "NO");
        text << line;
        csv += "case_" + std::to_string(rec.case_id) + "," + computed + "," + printed + "," +
               (match ? "true" : "false") + ",\n";
    }
    text << "index matches: " << out.index_matches << "/" << out.cases << "\n\n";

    out.summary = cohort_summary(records);
    const CohortSummary& s = out.summary;
    const std::string min_pct = format_printed_percent(s.min_index_percent);
    const std::string max_pct = format_printed_percent(s.max_index_percent);
    const bool median_ok = s.median_total_cells == 2449.0;
    const bool min_ok = s.min_total_cells == 1161;
    const bool max_ok = s.max_total_cells == 2882;
    const bool lo_ok = min_pct == "0.3%";
    const bool hi_ok = max_pct == "33.4%";
    out.cohort_matches = median_ok && min_ok && max_ok && lo_ok && hi_ok;

    char median_buf[32];
    std::snprintf(median_buf, sizeof median_buf, "%g", s.median_total_cells);
    auto row = [&csv](const std::string& item, const std::string& computed, const std::string& printed, bool ok) {
        csv += item + "," + computed + "," + printed + "," + (ok ? "true" : "false") + ",\n";
    };
    row("median_total_cells", median_buf, "2449", median_ok);
    row("min_total_cells", std::to_string(s.min_total_cells), "1161", min_ok);
    row("max_total_cells", std::to_string(s.max_total_cells), "2882", max_ok);
    row("min_index", min_pct, "0.3%", lo_ok);
    row("max_index", max_pct, "33.4%", hi_ok);

    const double delta = s.pearson_r - kPublishedPearsonR;
    char pearson_buf[64];
    std::snprintf(pearson_buf, sizeof pearson_buf, "%.12f", s.pearson_r);
    char delta_buf[64];
    std::snprintf(delta_buf, sizeof delta_buf, "%+.6f", delta);
    csv += std::string("pearson_r,") + pearson_buf + ",0.95127,," + delta_buf + "\n";

    text << "cohort: median total cells " << median_buf << " (published 2449) "
         << (median_ok ? "ok" : "MISMATCH") << "\n";
    text << "        total cells range " << s.min_total_cells << "-" << s.max_total_cells
         << " (published 1161-2882) " << (min_ok && max_ok ? "ok" : "MISMATCH") << "\n";
    text << "        index range " << min_pct << "-" << max_pct << " (published 0.3%-33.4%) "
         << (lo_ok && hi_ok ? "ok" : "MISMATCH") << "\n\n";
    text << "pearson r (digital vs visual, printed percentages): " << pearson_buf << "\n";
    text << "published r: 0.95127, delta " << delta_buf << "\n";
    text << "\n" << (out.passed() ? "validation PASSED" : "validation FAILED") << "\n";

    out.text = text.str();
    out.csv = std::move(csv);
    return out;
}

}  // namespace ki67
