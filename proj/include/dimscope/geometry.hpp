#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "dimscope/point_cloud.hpp"

namespace dimscope {

enum class ManifoldKind {
    unit_cube,
    unit_sphere,
    unit_sphere_gaussian_mix,
    mobius_strip,
    swiss_roll,
    paraboloid,
};

struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::unit_cube;
    /// Cube: side count of [0,1]^k. Spheres: k for S^k in R^{k+1}.
    /// Fixed at 2 for the Mobius strip, Swiss roll and paraboloid.
    int intrinsic_dim = 3;
    /// Gaussian-mixture sphere: ambient standard deviation around each pole.
    double mix_sd = 0.5;
    /// Gaussian-mixture sphere: probability of the north pole component.
    double mix_weight = 0.5;
};

enum class FractalKind { sierpinski_triangle, sierpinski_carpet, menger_sponge };

struct FractalSpec {
    FractalKind kind = FractalKind::sierpinski_carpet;
    int burn_in = 100;
};

struct CascadeSpec {
    int levels = 17;
    /// Default gives a mean multiplier of 1/2: -ln 2 - sd^2 / 2.
    double log_mean = -0.69314718055994530942 - 0.5 * 0.6 * 0.6;
    double log_sd = 0.6;
};

/// Multiplicative cascade on the dyadic tree. multipliers[l] holds the
/// 2^(l+1) weights drawn at level l; leaf_masses has 2^levels entries and
/// leaf k is the product of its ancestors' multipliers, root first.
struct Cascade {
    std::vector<std::vector<double>> multipliers;
    std::vector<double> leaf_masses;
};

/// Analytic similarity dimension of the attractor.
double hausdorff_dimension(FractalKind kind);
/// Ambient dimension the sampler emits.
std::size_t ambient_dimension(const ManifoldSpec& spec);
int intrinsic_dimension(const ManifoldSpec& spec);

PointCloud sample_manifold(const ManifoldSpec& spec, std::size_t n, Seed seed);
PointCloud sample_ifs_fractal(const FractalSpec& spec, std::size_t n, Seed seed);

Cascade build_lognormal_cascade(const CascadeSpec& spec, Seed seed);
/// Graph {(k / 2^J, X_k / max(X))} of the cascade's leaf masses.
PointCloud sample_lognormal_cascade(const CascadeSpec& spec, Seed seed);

std::string_view to_string(ManifoldKind kind);
std::string_view to_string(FractalKind kind);

}  // namespace dimscope
