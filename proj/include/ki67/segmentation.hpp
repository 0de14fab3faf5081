#pragma once

#include "ki67/mask.hpp"
#include "ki67/raster.hpp"

namespace ki67 {

/// Closed circular hue interval in degrees. `from > to` wraps through 0,
/// e.g. {330, 50} covers [330, 360) and [0, 50].
struct HueRange {
    double from = 0.0;
    double to = 0.0;

    bool contains(double hue) const noexcept {
        return from <= to ? (hue >= from && hue <= to) : (hue >= from || hue <= to);
    }
    bool overlaps(const HueRange& other) const noexcept;
};

struct StainThresholds {
    HueRange positive_hue;
    HueRange negative_hue;
    double min_saturation = 0.0;
    double min_value = 0.0;
    double max_value = 1.0;

    /// Throws Error(Config) when a bound is out of range, min_value >= max_value,
    /// or the two hue windows overlap.
    void validate() const;
};

/// DAB brown/red positive window 330..50 deg, hematoxylin blue negative window
/// 180..280 deg, S >= 0.15, V in [0.10, 0.95].
StainThresholds default_thresholds() noexcept;

struct SegmentationResult {
    BinaryMask positive;
    BinaryMask negative;
};

enum class PixelClass { Background, Positive, Negative };

PixelClass classify_pixel(Rgb pixel, const StainThresholds& thresholds) noexcept;

/// Pointwise HSV classification into disjoint positive / negative masks.
/// Thresholds are validated first.
SegmentationResult classify_pixels(const RasterImage& image, const StainThresholds& thresholds);

}  // namespace ki67
