#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "dimscope/rng.hpp"

namespace dimscope {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Provenance {
    std::string generator;
    nlohmann::json params = nlohmann::json::object();
    std::vector<std::string> transforms;  ///< applied lifts/noise, in order
};

/// n x d sample of finite points. Immutable once built.
class PointCloud {
public:
    /// Throws InvalidArgument on an empty matrix or a non-finite coordinate.
    explicit PointCloud(Matrix points, Provenance meta = {});

    std::size_t n() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    std::size_t d() const noexcept { return static_cast<std::size_t>(points_.cols()); }
    const Matrix& points() const noexcept { return points_; }
    const Provenance& meta() const noexcept { return meta_; }
    const double* row(std::size_t i) const noexcept { return points_.data() + i * d(); }

private:
    Matrix points_;
    Provenance meta_;
};

enum class LiftScheme {
    /// The k-th appended coordinate (from 0) is f_{k mod 4}(x_{k mod d}) with
    /// f = {sin(pi x), x^2, cos(pi x), x^3}.
    polynomial_periodic,
};

PointCloud lift_dimension(const PointCloud& cloud, std::size_t target_d,
                          LiftScheme scheme = LiftScheme::polynomial_periodic);

/// Adds independent Normal(0, sigma^2) to every coordinate.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, Seed seed);

/// Appends round(fraction * n) points uniform in the tight bounding box.
PointCloud add_uniform_background(const PointCloud& cloud, double fraction, Seed seed);

/// m points without replacement, kept in their original relative order.
PointCloud subsample(const PointCloud& cloud, std::size_t m, Seed seed);

/// Drops exact duplicate rows, keeping the first occurrence.
PointCloud deduplicate(const PointCloud& cloud);

}  // namespace dimscope
