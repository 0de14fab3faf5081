#include "ki67/mask.hpp"

#include "ki67/error.hpp"

#include <algorithm>
#include <numeric>

namespace ki67 {

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument, "mask dimensions must be positive");
    }
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BinaryMask::popcount() const noexcept {
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
}

BinaryMask BinaryMask::complement() const {
    BinaryMask out = *this;
    for (auto& b : out.bits_) {
        b ^= 1;
    }
    return out;
}

static void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorCode::InvalidArgument, "mask dimensions differ");
    }
}

bool BinaryMask::is_subset_of(const BinaryMask& other) const {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] && !other.bits_[i]) {
            return false;
        }
    }
    return true;
}

bool BinaryMask::intersects(const BinaryMask& other) const {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] && other.bits_[i]) {
            return true;
        }
    }
    return false;
}

}  // namespace ki67
