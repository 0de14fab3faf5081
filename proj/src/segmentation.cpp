#include "ki67/segmentation.hpp"

#include "ki67/error.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace ki67 {

namespace {

struct Interval {
    double lo;
    double hi;
};

// Splits a circular range into at most two linear pieces of [0, 360].
int linear_pieces(const HueRange& range, std::array<Interval, 2>& out) {
    if (range.from <= range.to) {
        out[0] = {range.from, range.to};
        return 1;
    }
    out[0] = {range.from, 360.0};
    out[1] = {0.0, range.to};
    return 2;
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

bool HueRange::overlaps(const HueRange& other) const noexcept {
    std::array<Interval, 2> a{};
    std::array<Interval, 2> b{};
    const int na = linear_pieces(*this, a);
    const int nb = linear_pieces(other, b);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            if (a[i].lo <= b[j].hi && b[j].lo <= a[i].hi) {
                // 360 and 0 are the same hue but rgb_to_hsv never yields 360,
                // so touching only at 360 is not an overlap.
                const double lo = std::max(a[i].lo, b[j].lo);
                if (lo >= 360.0) {
                    continue;
                }
                return true;
            }
        }
    }
    return false;
}

void StainThresholds::validate() const {
    auto hue_ok = [](const HueRange& r) {
        return r.from >= 0.0 && r.from <= 360.0 && r.to >= 0.0 && r.to <= 360.0;
    };
    if (!hue_ok(positive_hue) || !hue_ok(negative_hue)) {
        throw Error(ErrorCode::Config, "hue bounds must lie in [0, 360]");
    }
    if (!in_unit(min_saturation)) {
        throw Error(ErrorCode::Config, "min_saturation must lie in [0, 1]");
    }
    if (!in_unit(min_value) || !in_unit(max_value) || !(min_value < max_value)) {
        throw Error(ErrorCode::Config, "value bounds must satisfy 0 <= min_value < max_value <= 1");
    }
    if (positive_hue.overlaps(negative_hue)) {
        throw Error(ErrorCode::Config, "positive and negative hue windows overlap");
    }
}

StainThresholds default_thresholds() noexcept {
    StainThresholds t;
    t.positive_hue = {330.0, 50.0};
    t.negative_hue = {180.0, 280.0};
    t.min_saturation = 0.15;
    t.min_value = 0.10;
    t.max_value = 0.95;
    return t;
}

PixelClass classify_pixel(Rgb pixel, const StainThresholds& t) noexcept {
    const HsvPixel hsv = rgb_to_hsv(pixel);
    if (hsv.saturation < t.min_saturation || hsv.value < t.min_value || hsv.value > t.max_value) {
        return PixelClass::Background;
    }
    if (t.positive_hue.contains(hsv.hue)) {
        return PixelClass::Positive;
    }
    if (t.negative_hue.contains(hsv.hue)) {
        return PixelClass::Negative;
    }
    return PixelClass::Background;
}

SegmentationResult classify_pixels(const RasterImage& image, const StainThresholds& thresholds) {
    thresholds.validate();
    SegmentationResult out{BinaryMask(image.width(), image.height()),
                           BinaryMask(image.width(), image.height())};
    const auto pixels = image.pixels();
    auto pos = out.positive.bits();
    auto neg = out.negative.bits();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        switch (classify_pixel(pixels[i], thresholds)) {
            case PixelClass::Positive: pos[i] = 1; break;
            case PixelClass::Negative: neg[i] = 1; break;
            case PixelClass::Background: break;
        }
    }
    return out;
}

}  // namespace ki67
