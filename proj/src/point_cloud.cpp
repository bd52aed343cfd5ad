#include "dimscope/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "dimscope/error.hpp"

namespace dimscope {

PointCloud::PointCloud(Matrix points, Provenance meta) : points_(std::move(points)), meta_(std::move(meta)) {
    if (points_.rows() < 1 || points_.cols() < 1) throw InvalidArgument("point cloud needs n >= 1 and d >= 1");
    if (!points_.allFinite()) throw InvalidArgument("point cloud has a non-finite coordinate");
}

namespace {

Provenance with_transform(const Provenance& meta, std::string step) {
    Provenance out = meta;
    out.transforms.push_back(std::move(step));
    return out;
}

double lift_function(std::size_t which, double x) {
    switch (which % 4) {
        case 0: return std::sin(std::numbers::pi * x);
        case 1: return x * x;
        case 2: return std::cos(std::numbers::pi * x);
        default: return x * x * x;
    }
}

}  // namespace

PointCloud lift_dimension(const PointCloud& cloud, std::size_t target_d, LiftScheme scheme) {
    const std::size_t d = cloud.d();
    if (target_d <= d) {
        throw InvalidArgument("lift_dimension: target dimension " + std::to_string(target_d) +
                              " must exceed current dimension " + std::to_string(d));
    }
    (void)scheme;  // only one scheme so far
    Matrix out(cloud.n(), target_d);
    out.leftCols(d) = cloud.points();
    for (std::size_t k = d; k < target_d; ++k) {
        const std::size_t j = k - d;
        for (std::size_t i = 0; i < cloud.n(); ++i) out(i, k) = lift_function(j, cloud.points()(i, j % d));
    }
    return PointCloud(std::move(out),
                      with_transform(cloud.meta(), "lift:polynomial_periodic:" + std::to_string(target_d)));
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, Seed seed) {
    if (!std::isfinite(sigma) || sigma < 0.0) throw InvalidArgument("add_gaussian_noise: sigma must be finite and >= 0");
    Matrix out = cloud.points();
    if (sigma > 0.0) {
        Rng rng(seed);
        for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += sigma * rng.normal();
    }
    return PointCloud(std::move(out), with_transform(cloud.meta(), "gauss:" + std::to_string(sigma)));
}

PointCloud add_uniform_background(const PointCloud& cloud, double fraction, Seed seed) {
    if (!std::isfinite(fraction) || fraction < 0.0 || fraction > 1.0) {
        throw InvalidArgument("add_uniform_background: fraction must lie in [0, 1]");
    }
    const auto extra = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cloud.n())));
    const auto lo = cloud.points().colwise().minCoeff().eval();
    const auto hi = cloud.points().colwise().maxCoeff().eval();
    Matrix out(cloud.n() + extra, cloud.d());
    out.topRows(cloud.n()) = cloud.points();
    Rng rng(seed);
    for (std::size_t i = cloud.n(); i < cloud.n() + extra; ++i) {
        for (std::size_t k = 0; k < cloud.d(); ++k) out(i, k) = rng.uniform(lo(k), hi(k));
    }
    return PointCloud(std::move(out), with_transform(cloud.meta(), "background:" + std::to_string(fraction)));
}

PointCloud subsample(const PointCloud& cloud, std::size_t m, Seed seed) {
    const std::size_t n = cloud.n();
    if (m < 1 || m > n) {
        throw InvalidArgument("subsample: m = " + std::to_string(m) + " outside [1, " + std::to_string(n) + "]");
    }
    std::vector<std::size_t> index(n);
    std::iota(index.begin(), index.end(), std::size_t{0});
    if (m < n) {
        Rng rng(seed);
        for (std::size_t i = 0; i < m; ++i) std::swap(index[i], index[i + rng.below(n - i)]);
        index.resize(m);
        std::sort(index.begin(), index.end());
    }
    Matrix out(m, cloud.d());
    for (std::size_t i = 0; i < m; ++i) out.row(i) = cloud.points().row(index[i]);
    Provenance meta = cloud.meta();
    if (m < n) meta.transforms.push_back("subsample:" + std::to_string(m));
    return PointCloud(std::move(out), std::move(meta));
}

PointCloud deduplicate(const PointCloud& cloud) {
    const std::size_t n = cloud.n();
    const std::size_t d = cloud.d();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto row_less = [&](std::size_t a, std::size_t b) {
        const double* ra = cloud.row(a);
        const double* rb = cloud.row(b);
        if (std::lexicographical_compare(ra, ra + d, rb, rb + d)) return true;
        if (std::lexicographical_compare(rb, rb + d, ra, ra + d)) return false;
        return a < b;
    };
    std::sort(order.begin(), order.end(), row_less);
    std::vector<bool> keep(n, true);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::equal(cloud.row(order[i]), cloud.row(order[i]) + d, cloud.row(order[i - 1]))) keep[order[i]] = false;
    }
    const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
    Matrix out(kept, d);
    for (std::size_t i = 0, r = 0; i < n; ++i) {
        if (keep[i]) out.row(r++) = cloud.points().row(i);
    }
    return PointCloud(std::move(out), with_transform(cloud.meta(), "dedup"));
}

}  // namespace dimscope
