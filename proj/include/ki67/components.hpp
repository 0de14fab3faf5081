#pragma once

#include "ki67/mask.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace ki67 {

enum class Connectivity { Four = 4, Eight = 8 };

struct Component {
    std::uint32_t id = 0;
    std::size_t area = 0;
    int min_row = 0;
    int max_row = 0;
    int min_col = 0;
    int max_col = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
};

/// Label grid (0 = background) plus one entry per label; components[k].id == k + 1.
struct ComponentSet {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> labels;
    std::vector<Component> components;

    std::uint32_t label_at(int row, int col) const {
        return labels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
};

/// Two-pass union-find labeling. Ids 1..k follow the row-major order in which
/// each component's first pixel is met.
ComponentSet label_components(const BinaryMask& mask, Connectivity connectivity);

inline constexpr std::size_t kUnboundedArea = std::numeric_limits<std::size_t>::max();

/// Drops components outside [min_area, max_area] and compacts the surviving ids.
ComponentSet filter_by_area(const ComponentSet& set, std::size_t min_area,
                            std::size_t max_area = kUnboundedArea);

inline std::size_t count(const ComponentSet& set) noexcept { return set.components.size(); }

}  // namespace ki67
