#include "ki67/morphology.hpp"

#include "ki67/error.hpp"

#include <algorithm>
#include <string>

namespace ki67 {

StructuringElement::StructuringElement(const std::vector<std::vector<int>>& rows) {
    height_ = static_cast<int>(rows.size());
    width_ = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    if (height_ % 2 == 0 || width_ % 2 == 0) {
        throw Error(ErrorCode::Config, "structuring element dimensions must be odd");
    }
    const int cy = height_ / 2;
    const int cx = width_ / 2;
    for (int y = 0; y < height_; ++y) {
        if (static_cast<int>(rows[y].size()) != width_) {
            throw Error(ErrorCode::Config, "structuring element rows must have equal length");
        }
        for (int x = 0; x < width_; ++x) {
            const int v = rows[y][x];
            if (v != 0 && v != 1) {
                throw Error(ErrorCode::Config, "structuring element cells must be 0 or 1");
            }
            bits_.push_back(static_cast<unsigned char>(v));
            if (v) {
                offsets_.push_back({y - cy, x - cx});
            }
        }
    }
    if (!get(cy, cx)) {
        throw Error(ErrorCode::Config, "structuring element origin must be set");
    }
}

StructuringElement StructuringElement::square(int radius) {
    if (radius < 0) {
        throw Error(ErrorCode::Config, "structuring element radius must be >= 0");
    }
    const int n = 2 * radius + 1;
    return StructuringElement(std::vector<std::vector<int>>(n, std::vector<int>(n, 1)));
}

StructuringElement StructuringElement::cross(int radius) {
    if (radius < 0) {
        throw Error(ErrorCode::Config, "structuring element radius must be >= 0");
    }
    const int n = 2 * radius + 1;
    std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i) {
        rows[radius][i] = 1;
        rows[i][radius] = 1;
    }
    return StructuringElement(rows);
}

StructuringElement StructuringElement::reflect() const {
    std::vector<std::vector<int>> rows(height_, std::vector<int>(width_, 0));
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            rows[height_ - 1 - y][width_ - 1 - x] = get(y, x) ? 1 : 0;
        }
    }
    return StructuringElement(rows);
}

namespace {

// Combines `src` shifted by (dy, dx) into `dst`: dst(r, c) op= src(r + dy, c + dx),
// with out-of-range source cells read as 0.
template <typename Op>
void combine_shifted(const BinaryMask& src, BinaryMask& dst, int dy, int dx, Op op) {
    const int w = src.width();
    const int h = src.height();
    const auto in = src.bits();
    auto out = dst.bits();
    const int c_lo = std::max(0, -dx);
    const int c_hi = std::min(w, w - dx);  // exclusive
    for (int r = 0; r < h; ++r) {
        const int sr = r + dy;
        std::uint8_t* orow = out.data() + static_cast<std::size_t>(r) * w;
        if (sr < 0 || sr >= h || c_lo >= c_hi) {
            for (int c = 0; c < w; ++c) {
                orow[c] = op(orow[c], std::uint8_t{0});
            }
            continue;
        }
        const std::uint8_t* irow = in.data() + static_cast<std::size_t>(sr) * w;
        for (int c = 0; c < c_lo; ++c) {
            orow[c] = op(orow[c], std::uint8_t{0});
        }
        for (int c = c_lo; c < c_hi; ++c) {
            orow[c] = op(orow[c], irow[c + dx]);
        }
        for (int c = c_hi; c < w; ++c) {
            orow[c] = op(orow[c], std::uint8_t{0});
        }
    }
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
    BinaryMask out(mask.width(), mask.height(), false);
    for (const auto& o : se.offsets()) {
        combine_shifted(mask, out, -o.dy, -o.dx,
                        [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a | b; });
    }
    return out;
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
    BinaryMask out(mask.width(), mask.height(), true);
    for (const auto& o : se.offsets()) {
        combine_shifted(mask, out, o.dy, o.dx,
                        [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a & b; });
    }
    return out;
}

BinaryMask open(const BinaryMask& mask, const StructuringElement& se) {
    return dilate(erode(mask, se), se);
}

BinaryMask close(const BinaryMask& mask, const StructuringElement& se) {
    return erode(dilate(mask, se), se);
}

BinaryMask clean_mask(const BinaryMask& mask, const StructuringElement& se, int passes) {
    if (passes < 0) {
        throw Error(ErrorCode::Config, "morphology_passes must be >= 0");
    }
    BinaryMask out = mask;
    for (int i = 0; i < passes; ++i) {
        out = erode(out, se);
    }
    for (int i = 0; i < passes; ++i) {
        out = dilate(out, se);
    }
    return out;
}

}  // namespace ki67
