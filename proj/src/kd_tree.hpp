#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dimscope::detail {

/// Static k-d tree over a row-major point block. Points are copied into tree
/// order so each leaf is contiguous; original() maps back to input rows.
class KdTree {
public:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;  ///< -1 for leaves
        std::int32_t right = -1;
    };

    KdTree(const double* data, std::size_t n, std::size_t d, std::size_t leaf_size = 12);

    std::size_t size() const noexcept { return original_.size(); }
    std::size_t dim() const noexcept { return d_; }
    const double* point(std::size_t pos) const noexcept { return points_.data() + pos * d_; }
    std::uint32_t original(std::size_t pos) const noexcept { return original_[pos]; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

    /// Squared distance from q to the node's bounding box.
    double box_distance2(std::size_t node, const double* q) const noexcept;

private:
    std::int32_t build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size);

    std::size_t d_;
    std::vector<double> points_;
    std::vector<std::uint32_t> original_;
    std::vector<Node> nodes_;
    std::vector<double> lo_;  ///< node * d + k
    std::vector<double> hi_;
};

/// Squared Euclidean distance, summed in coordinate order.
inline double distance2(const double* a, const double* b, std::size_t d) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

}  // namespace dimscope::detail
