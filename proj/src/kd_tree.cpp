#include "kd_tree.hpp"

#include <algorithm>
#include <numeric>

namespace dimscope::detail {

KdTree::KdTree(const double* data, std::size_t n, std::size_t d, std::size_t leaf_size)
    : d_(d), points_(data, data + n * d), original_(n) {
    std::iota(original_.begin(), original_.end(), std::uint32_t{0});
    nodes_.reserve(2 * (n / std::max<std::size_t>(leaf_size, 1) + 1));
    build(0, static_cast<std::uint32_t>(n), std::max<std::size_t>(leaf_size, 1));

    // Reorder the coordinates to match the permuted index.
    std::vector<double> ordered(n * d);
    for (std::size_t pos = 0; pos < n; ++pos) {
        std::copy_n(data + static_cast<std::size_t>(original_[pos]) * d, d, ordered.begin() + pos * d);
    }
    points_ = std::move(ordered);

    lo_.assign(nodes_.size() * d, 0.0);
    hi_.assign(nodes_.size() * d, 0.0);
    for (std::size_t node = nodes_.size(); node-- > 0;) {
        const Node& nd = nodes_[node];
        double* lo = lo_.data() + node * d;
        double* hi = hi_.data() + node * d;
        if (nd.left < 0) {
            std::copy_n(point(nd.begin), d, lo);
            std::copy_n(point(nd.begin), d, hi);
            for (std::uint32_t p = nd.begin + 1; p < nd.end; ++p) {
                const double* x = point(p);
                for (std::size_t k = 0; k < d; ++k) {
                    lo[k] = std::min(lo[k], x[k]);
                    hi[k] = std::max(hi[k], x[k]);
                }
            }
        } else {
            // Children are created after their parent, so they are done already.
            const double* llo = lo_.data() + static_cast<std::size_t>(nd.left) * d;
            const double* lhi = hi_.data() + static_cast<std::size_t>(nd.left) * d;
            const double* rlo = lo_.data() + static_cast<std::size_t>(nd.right) * d;
            const double* rhi = hi_.data() + static_cast<std::size_t>(nd.right) * d;
            for (std::size_t k = 0; k < d; ++k) {
                lo[k] = std::min(llo[k], rlo[k]);
                hi[k] = std::max(lhi[k], rhi[k]);
            }
        }
    }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end, -1, -1});
    if (end - begin <= leaf_size) return id;

    // Split the widest coordinate at the median; points_ is still in input order here.
    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t k = 0; k < d_; ++k) {
        double lo = points_[original_[begin] * d_ + k];
        double hi = lo;
        for (std::uint32_t p = begin + 1; p < end; ++p) {
            const double v = points_[original_[p] * d_ + k];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = k;
        }
    }
    if (widest <= 0.0) return id;  // all points identical

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(original_.begin() + begin, original_.begin() + mid, original_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double va = points_[a * d_ + axis];
                         const double vb = points_[b * d_ + axis];
                         return va < vb || (va == vb && a < b);
                     });
    const std::int32_t left = build(begin, mid, leaf_size);
    const std::int32_t right = build(mid, end, leaf_size);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
}

double KdTree::box_distance2(std::size_t node, const double* q) const noexcept {
    const double* lo = lo_.data() + node * d_;
    const double* hi = hi_.data() + node * d_;
    double s = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
        double t = 0.0;
        if (q[k] < lo[k]) {
            t = lo[k] - q[k];
        } else if (q[k] > hi[k]) {
            t = q[k] - hi[k];
        }
        s += t * t;
    }
    return s;
}

}  // namespace dimscope::detail
