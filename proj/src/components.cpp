#include "ki67/components.hpp"

#include "ki67/error.hpp"

#include <algorithm>
#include <numeric>

namespace ki67 {

namespace {

class DisjointSets {
public:
    std::uint32_t make() {
        parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
        return parent_.back();
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            // Smaller root wins so roots stay stable.
            if (b < a) {
                std::swap(a, b);
            }
            parent_[b] = a;
        }
    }

    std::size_t size() const noexcept { return parent_.size(); }

private:
    std::vector<std::uint32_t> parent_;
};

}  // namespace

ComponentSet label_components(const BinaryMask& mask, Connectivity connectivity) {
    const int w = mask.width();
    const int h = mask.height();
    const bool diag = connectivity == Connectivity::Eight;
    if (connectivity != Connectivity::Four && connectivity != Connectivity::Eight) {
        throw Error(ErrorCode::InvalidArgument, "connectivity must be 4 or 8");
    }

    ComponentSet out;
    out.width = w;
    out.height = h;
    out.labels.assign(mask.size(), 0);

    // Provisional labels start at 1; slot 0 of the forest is unused background.
    DisjointSets sets;
    sets.make();
    const auto bits = mask.bits();
    auto& labels = out.labels;
    auto at = [w](int r, int c) { return static_cast<std::size_t>(r) * w + c; };

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!bits[at(r, c)]) {
                continue;
            }
            std::uint32_t neighbours[4];
            int n = 0;
            if (c > 0 && labels[at(r, c - 1)]) neighbours[n++] = labels[at(r, c - 1)];
            if (r > 0) {
                if (labels[at(r - 1, c)]) neighbours[n++] = labels[at(r - 1, c)];
                if (diag && c > 0 && labels[at(r - 1, c - 1)]) neighbours[n++] = labels[at(r - 1, c - 1)];
                if (diag && c + 1 < w && labels[at(r - 1, c + 1)]) neighbours[n++] = labels[at(r - 1, c + 1)];
            }
            if (n == 0) {
                labels[at(r, c)] = sets.make();
                continue;
            }
            labels[at(r, c)] = neighbours[0];
            for (int k = 1; k < n; ++k) {
                sets.unite(neighbours[0], neighbours[k]);
            }
        }
    }

    std::vector<std::uint32_t> final_id(sets.size(), 0);
    std::uint32_t next = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            auto& label = labels[at(r, c)];
            if (!label) {
                continue;
            }
            const std::uint32_t root = sets.find(label);
            if (!final_id[root]) {
                final_id[root] = ++next;
                Component comp;
                comp.id = next;
                comp.min_row = comp.max_row = r;
                comp.min_col = comp.max_col = c;
                out.components.push_back(comp);
            }
            label = final_id[root];
            Component& comp = out.components[label - 1];
            ++comp.area;
            comp.min_row = std::min(comp.min_row, r);
            comp.max_row = std::max(comp.max_row, r);
            comp.min_col = std::min(comp.min_col, c);
            comp.max_col = std::max(comp.max_col, c);
            comp.centroid_row += r;
            comp.centroid_col += c;
        }
    }
    for (auto& comp : out.components) {
        comp.centroid_row /= static_cast<double>(comp.area);
        comp.centroid_col /= static_cast<double>(comp.area);
    }
    return out;
}

ComponentSet filter_by_area(const ComponentSet& set, std::size_t min_area, std::size_t max_area) {
    if (max_area < min_area) {
        throw Error(ErrorCode::Config, "max_area must be >= min_area");
    }
    ComponentSet out;
    out.width = set.width;
    out.height = set.height;
    std::vector<std::uint32_t> remap(set.components.size() + 1, 0);
    for (const auto& comp : set.components) {
        if (comp.area < min_area || comp.area > max_area) {
            continue;
        }
        Component kept = comp;
        kept.id = static_cast<std::uint32_t>(out.components.size() + 1);
        remap[comp.id] = kept.id;
        out.components.push_back(kept);
    }
    out.labels.resize(set.labels.size());
    std::transform(set.labels.begin(), set.labels.end(), out.labels.begin(),
                   [&remap](std::uint32_t l) { return remap[l]; });
    return out;
}

}  // namespace ki67
