#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "dimscope/point_cloud.hpp"

namespace dimscope::oracle {

inline double distance(const PointCloud& c, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.d(); ++k) {
        const double t = c.row(a)[k] - c.row(b)[k];
        s += t * t;
    }
    return std::sqrt(s);
}

/// Minimum total weight over all n^(n-2) labelled spanning trees, enumerated
/// through their Pruefer sequences.
inline double brute_force_mst_weight(const PointCloud& c) {
    const std::size_t n = c.n();
    if (n == 2) return distance(c, 0, 1);
    std::vector<std::size_t> seq(n - 2, 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> degree(n);
    while (true) {
        std::fill(degree.begin(), degree.end(), 1);
        for (std::size_t s : seq) ++degree[s];
        double total = 0.0;
        for (std::size_t s : seq) {
            std::size_t leaf = 0;
            while (degree[leaf] != 1) ++leaf;
            total += distance(c, leaf, s);
            --degree[leaf];
            --degree[s];
        }
        std::size_t u = n, v = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (degree[i] == 1) (u == n ? u : v) = i;
        }
        total += distance(c, u, v);
        best = std::min(best, total);

        std::size_t pos = 0;
        while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
        if (pos == seq.size()) break;
    }
    return best;
}

}  // namespace dimscope::oracle
