#pragma once

#include "ki67/mask.hpp"
#include "ki67/raster.hpp"
#include "ki67/segmentation.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace ki67 {

/// Scene description for a synthetic stained field. Nuclei are filled circles
/// placed by rejection sampling; identical specs give identical output.
struct SynthSpec {
    int width = 256;
    int height = 256;
    int positive_count = 0;
    int negative_count = 0;
    int min_radius = 4;
    int max_radius = 7;
    Rgb positive_color{140, 90, 50};
    Rgb negative_color{60, 80, 170};
    Rgb background_color{235, 230, 225};
    int jitter = 0;  // per-channel uniform noise amplitude, 0..30
    std::uint64_t seed = 0;
};

struct Disk {
    int center_row = 0;
    int center_col = 0;
    int radius = 0;
    std::size_t area = 0;
    bool positive = false;
};

struct GroundTruth {
    RasterImage image;
    BinaryMask positive_mask;
    BinaryMask negative_mask;
    int positive_count = 0;
    int negative_count = 0;
    std::vector<Disk> disks;  // positives first, then negatives

    std::vector<std::size_t> per_disk_areas() const;
    double expected_index() const noexcept;
};

/// Deterministic PRNG for the generator: std::mt19937_64 (fully specified by
/// the C++ standard) with portable range reduction.
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform integer in [lo, hi] by rejection on the top of the 64-bit range.
    int uniform_int(int lo, int hi);

private:
    std::mt19937_64 engine_;
};

/// Maximum rejection-sampling draws per nucleus before placement fails.
inline constexpr int kPlacementAttempts = 20000;

/// Builds the scene. Every pixel's color (after jitter) is checked against
/// `thresholds` and re-drawn until it classifies as its ground-truth class.
/// Throws Error(Placement) when the scene is too dense, Error(InvalidArgument)
/// for an invalid spec or colors the thresholds cannot separate.
GroundTruth generate(const SynthSpec& spec, const StainThresholds& thresholds = default_thresholds());

void validate(const SynthSpec& spec);

}  // namespace ki67
