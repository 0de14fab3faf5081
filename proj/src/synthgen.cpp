#include "ki67/synthgen.hpp"

#include "ki67/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace ki67 {

int SynthRng::uniform_int(int lo, int hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return static_cast<int>(lo + static_cast<std::int64_t>(x % range));
}

std::vector<std::size_t> GroundTruth::per_disk_areas() const {
    std::vector<std::size_t> out;
    out.reserve(disks.size());
    for (const auto& d : disks) {
        out.push_back(d.area);
    }
    return out;
}

double GroundTruth::expected_index() const noexcept {
    const int total = positive_count + negative_count;
    return total == 0 ? 0.0 : static_cast<double>(positive_count) / total;
}

void validate(const SynthSpec& spec) {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, "synth spec: " + msg); };
    if (spec.width < 1 || spec.height < 1) fail("width and height must be positive");
    if (spec.positive_count < 0 || spec.negative_count < 0) fail("counts must be non-negative");
    if (spec.min_radius < 3) fail("min radius must be >= 3 so nuclei survive a 3x3 opening");
    if (spec.max_radius < spec.min_radius) fail("max radius must be >= min radius");
    if (spec.jitter < 0 || spec.jitter > 30) fail("jitter must lie in [0, 30]");
}

namespace {

// Buckets placed disks on a coarse grid so each candidate only checks nearby disks.
class PlacementGrid {
public:
    explicit PlacementGrid(int cell) : cell_(cell) {}

    bool clear_of(const std::vector<Disk>& disks, int row, int col, int radius) const {
        const int cr = row / cell_;
        const int cc = col / cell_;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                auto it = buckets_.find(key(cr + dr, cc + dc));
                if (it == buckets_.end()) {
                    continue;
                }
                for (const std::size_t idx : it->second) {
                    const Disk& d = disks[idx];
                    const double gap = d.radius + radius + 2.0;
                    const double dy = d.center_row - row;
                    const double dx = d.center_col - col;
                    if (dy * dy + dx * dx <= gap * gap) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    void add(std::size_t idx, int row, int col) { buckets_[key(row / cell_, col / cell_)].push_back(idx); }

private:
    static std::int64_t key(int r, int c) { return (static_cast<std::int64_t>(r) << 32) ^ static_cast<std::uint32_t>(c); }

    int cell_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

PixelClass class_of(bool positive) { return positive ? PixelClass::Positive : PixelClass::Negative; }

Rgb jittered(Rgb base, PixelClass expected, int amplitude, const StainThresholds& thresholds, SynthRng& rng) {
    constexpr int kRedraws = 64;
    if (amplitude == 0) {
        return base;
    }
    auto channel = [&](std::uint8_t v) {
        return static_cast<std::uint8_t>(std::clamp(v + rng.uniform_int(-amplitude, amplitude), 0, 255));
    };
    for (int attempt = 0; attempt < kRedraws; ++attempt) {
        const Rgb c{channel(base.r), channel(base.g), channel(base.b)};
        if (classify_pixel(c, thresholds) == expected) {
            return c;
        }
    }
    return base;
}

}  // namespace

GroundTruth generate(const SynthSpec& spec, const StainThresholds& thresholds) {
    validate(spec);
    thresholds.validate();
    if (classify_pixel(spec.positive_color, thresholds) != PixelClass::Positive ||
        classify_pixel(spec.negative_color, thresholds) != PixelClass::Negative ||
        classify_pixel(spec.background_color, thresholds) != PixelClass::Background) {
        throw Error(ErrorCode::InvalidArgument,
                    "synth spec: positive/negative/background colors are not separable under the thresholds");
    }

    SynthRng rng(spec.seed);
    GroundTruth gt{RasterImage(spec.width, spec.height, spec.background_color),
                   BinaryMask(spec.width, spec.height), BinaryMask(spec.width, spec.height),
                   spec.positive_count, spec.negative_count, {}};

    // Centers keep a 1-pixel margin: radius + 1 <= center <= size - 2 - radius.
    PlacementGrid grid(2 * spec.max_radius + 3);
    const int total = spec.positive_count + spec.negative_count;
    gt.disks.reserve(static_cast<std::size_t>(total));
    for (int n = 0; n < total; ++n) {
        const bool positive = n < spec.positive_count;
        bool placed = false;
        for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
            const int radius = rng.uniform_int(spec.min_radius, spec.max_radius);
            const int lo = radius + 1;
            const int hi_row = spec.height - 2 - radius;
            const int hi_col = spec.width - 2 - radius;
            if (hi_row < lo || hi_col < lo) {
                continue;
            }
            const int row = rng.uniform_int(lo, hi_row);
            const int col = rng.uniform_int(lo, hi_col);
            if (!grid.clear_of(gt.disks, row, col, radius)) {
                continue;
            }
            grid.add(gt.disks.size(), row, col);
            gt.disks.push_back({row, col, radius, 0, positive});
            placed = true;
        }
        if (!placed) {
            throw Error(ErrorCode::Placement,
                        "placement failed: could not fit nucleus " + std::to_string(n + 1) + " of " +
                            std::to_string(total) + " after " + std::to_string(kPlacementAttempts) +
                            " attempts (spec too dense)");
        }
    }

    for (auto& disk : gt.disks) {
        BinaryMask& mask = disk.positive ? gt.positive_mask : gt.negative_mask;
        const Rgb base = disk.positive ? spec.positive_color : spec.negative_color;
        const int r2 = disk.radius * disk.radius;
        for (int dy = -disk.radius; dy <= disk.radius; ++dy) {
            for (int dx = -disk.radius; dx <= disk.radius; ++dx) {
                if (dy * dy + dx * dx > r2) {
                    continue;
                }
                const int row = disk.center_row + dy;
                const int col = disk.center_col + dx;
                mask.set(row, col, true);
                gt.image.at(row, col) = jittered(base, class_of(disk.positive), spec.jitter, thresholds, rng);
                ++disk.area;
            }
        }
    }

    if (spec.jitter > 0) {
        for (int row = 0; row < spec.height; ++row) {
            for (int col = 0; col < spec.width; ++col) {
                if (!gt.positive_mask.get(row, col) && !gt.negative_mask.get(row, col)) {
                    gt.image.at(row, col) =
                        jittered(spec.background_color, PixelClass::Background, spec.jitter, thresholds, rng);
                }
            }
        }
    }
    return gt;
}

}  // namespace ki67
