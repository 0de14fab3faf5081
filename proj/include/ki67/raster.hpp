#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ki67 {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Hexcone HSV. Hue in degrees [0, 360), saturation and value in [0, 1].
struct HsvPixel {
    double hue = 0.0;
    double saturation = 0.0;
    double value = 0.0;
};

/// Row-major 8-bit RGB image. Width and height are always >= 1.
class RasterImage {
public:
    RasterImage(int width, int height, Rgb fill = {});
    RasterImage(int width, int height, std::vector<Rgb> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    const Rgb& at(int row, int col) const { return pixels_[index(row, col)]; }
    Rgb& at(int row, int col) { return pixels_[index(row, col)]; }

    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    std::span<Rgb> pixels() noexcept { return pixels_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_;
    int height_;
    std::vector<Rgb> pixels_;
};

HsvPixel rgb_to_hsv(Rgb pixel) noexcept;

/// Decodes an 8-bit RGB or RGBA PNG; alpha is discarded. Gray, palette and
/// 16-bit files are rejected with ErrorCode::Format.
RasterImage load_image(const std::filesystem::path& path);

/// Writes a lossless 8-bit RGB PNG.
void save_image(const RasterImage& image, const std::filesystem::path& path);

}  // namespace ki67
