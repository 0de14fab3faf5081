#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ki67 {

/// Row-major boolean grid. Bits are stored one per byte (0 or 1).
class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool get(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool value) { bits_[index(row, col)] = value ? 1 : 0; }

    /// False for coordinates outside the grid.
    bool get_or_background(int row, int col) const noexcept {
        return row >= 0 && col >= 0 && row < height_ && col < width_ && bits_[index(row, col)] != 0;
    }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::span<std::uint8_t> bits() noexcept { return bits_; }

    std::size_t popcount() const noexcept;
    BinaryMask complement() const;
    bool is_subset_of(const BinaryMask& other) const;
    bool intersects(const BinaryMask& other) const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

}  // namespace ki67
