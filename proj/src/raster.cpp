#include "ki67/raster.hpp"

#include "ki67/error.hpp"

#include <png.h>

#include <algorithm>
#include <string>

namespace ki67 {

RasterImage::RasterImage(int width, int height, Rgb fill)
    : RasterImage(width, height,
                  std::vector<Rgb>(width > 0 && height > 0
                                       ? static_cast<std::size_t>(width) * static_cast<std::size_t>(height)
                                       : 0,
                                   fill)) {}

RasterImage::RasterImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::InvalidArgument, "pixel count does not match width x height");
    }
}

HsvPixel rgb_to_hsv(Rgb pixel) noexcept {
    const int r = pixel.r;
    const int g = pixel.g;
    const int b = pixel.b;
    const int hi = std::max({r, g, b});
    const int lo = std::min({r, g, b});
    const int chroma = hi - lo;

    HsvPixel out;
    out.value = hi / 255.0;
    out.saturation = hi == 0 ? 0.0 : static_cast<double>(chroma) / hi;
    if (chroma == 0) {
        return out;  // achromatic: hue 0
    }

    double sector;
    if (hi == r) {
        sector = static_cast<double>(g - b) / chroma;
    } else if (hi == g) {
        sector = static_cast<double>(b - r) / chroma + 2.0;
    } else {
        sector = static_cast<double>(r - g) / chroma + 4.0;
    }
    double hue = 60.0 * sector;
    if (hue < 0.0) {
        hue += 360.0;
    }
    if (hue >= 360.0) {
        hue -= 360.0;
    }
    out.hue = hue;
    return out;
}

namespace {

struct PngImageGuard {
    png_image image{};

    PngImageGuard() {
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImageGuard() { png_image_free(&image); }
    PngImageGuard(const PngImageGuard&) = delete;
    PngImageGuard& operator=(const PngImageGuard&) = delete;
};

}  // namespace

RasterImage load_image(const std::filesystem::path& path) {
    PngImageGuard png;
    const std::string name = path.string();
    if (!png_image_begin_read_from_file(&png.image, name.c_str())) {
        throw Error(ErrorCode::Io, "cannot read PNG '" + name + "': " + png.image.message);
    }
    const auto format = png.image.format;
    if ((format & PNG_FORMAT_FLAG_LINEAR) != 0) {
        throw Error(ErrorCode::Format, "'" + name + "': 16-bit channels are not supported");
    }
    if ((format & PNG_FORMAT_FLAG_COLORMAP) != 0 || (format & PNG_FORMAT_FLAG_COLOR) == 0) {
        throw Error(ErrorCode::Format, "'" + name + "': only RGB and RGBA color types are supported");
    }
    if (png.image.width == 0 || png.image.height == 0) {
        throw Error(ErrorCode::Format, "'" + name + "': zero-dimension image");
    }

    // Alpha is read and then dropped; asking libpng for RGB would composite.
    const bool has_alpha = (format & PNG_FORMAT_FLAG_ALPHA) != 0;
    png.image.format = has_alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
    const int width = static_cast<int>(png.image.width);
    const int height = static_cast<int>(png.image.height);
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
        throw Error(ErrorCode::Format, "cannot decode PNG '" + name + "': " + png.image.message);
    }
    const std::size_t stride = has_alpha ? 4 : 3;
    std::vector<Rgb> pixels(count);
    for (std::size_t i = 0; i < count; ++i) {
        pixels[i] = {buffer[i * stride], buffer[i * stride + 1], buffer[i * stride + 2]};
    }
    return RasterImage(width, height, std::move(pixels));
}

void save_image(const RasterImage& image, const std::filesystem::path& path) {
    PngImageGuard png;
    png.image.width = static_cast<png_uint_32>(image.width());
    png.image.height = static_cast<png_uint_32>(image.height());
    png.image.format = PNG_FORMAT_RGB;
    const std::string name = path.string();
    if (!png_image_write_to_file(&png.image, name.c_str(), 0, image.pixels().data(), 0, nullptr)) {
        throw Error(ErrorCode::Io, "cannot write PNG '" + name + "': " + png.image.message);
    }
}

}  // namespace ki67
