#pragma once

#include "ki67/mask.hpp"

#include <vector>

namespace ki67 {

/// Binary kernel with odd dimensions; the origin is the center cell and must be set.
class StructuringElement {
public:
    struct Offset {
        int dy;
        int dx;
    };

    /// Rows of 0/1 values. Throws Error(Config) on even or ragged dimensions,
    /// or an unset origin.
    explicit StructuringElement(const std::vector<std::vector<int>>& rows);

    /// (2r+1) x (2r+1) full square; radius 1 is the default 3x3 element.
    static StructuringElement square(int radius);
    /// Plus-shaped element with arms of length `radius`.
    static StructuringElement cross(int radius);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool get(int row, int col) const { return bits_[static_cast<std::size_t>(row * width_ + col)] != 0; }

    /// Set cells relative to the origin.
    const std::vector<Offset>& offsets() const noexcept { return offsets_; }

    /// Point reflection through the origin.
    StructuringElement reflect() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<unsigned char> bits_;
    std::vector<Offset> offsets_;
};

// Outside-image cells count as background for every operator.
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask open(const BinaryMask& mask, const StructuringElement& se);
BinaryMask close(const BinaryMask& mask, const StructuringElement& se);

/// `passes` erosions followed by `passes` dilations; identity for passes == 0.
BinaryMask clean_mask(const BinaryMask& mask, const StructuringElement& se, int passes);

}  // namespace ki67
