#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dimscope/point_cloud.hpp"

namespace dimscope {

struct Edge {
    std::uint32_t u = 0;  ///< smaller endpoint index
    std::uint32_t v = 0;
    double weight = 0.0;
};

/// Exact Euclidean MST. Edges are sorted by (weight, u, v).
class MinimumSpanningTree {
public:
    MinimumSpanningTree(std::size_t n, std::vector<Edge> edges, Provenance source = {});

    std::size_t n() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Provenance& source_meta() const noexcept { return source_; }

    double total_weight() const;
    std::vector<double> weights() const;
    std::vector<std::uint32_t> degrees() const;

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    Provenance source_;
};

enum class MstAlgorithm {
    automatic,       ///< Prim for small or high-dimensional inputs, Boruvka otherwise
    prim,            ///< dense O(n^2) baseline
    boruvka_kdtree,  ///< Boruvka with k-d tree nearest foreign neighbour queries
};

/// Ties between equal-length edges are broken on (min index, max index), so
/// every algorithm returns the same tree. Throws InvalidArgument for n < 2.
MinimumSpanningTree build_emst(const PointCloud& cloud, MstAlgorithm algorithm = MstAlgorithm::automatic);

/// Sum of weight^alpha; zero-length edges contribute 0.
double edge_power_sum(const MinimumSpanningTree& tree, double alpha);
double edge_power_sum(std::span<const double> weights, double alpha);

/// (1/n) * sum of squared vertex degrees.
double degree_statistic(const MinimumSpanningTree& tree);

/// histogram[k] = number of vertices of degree k.
std::vector<std::size_t> degree_histogram(const MinimumSpanningTree& tree);

}  // namespace dimscope
