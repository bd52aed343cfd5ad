#include "dimscope/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dimscope/error.hpp"

namespace dimscope {

namespace {

constexpr double kPi = std::numbers::pi;

// Swiss roll parameter range and height.
constexpr double kRollTMin = 1.5 * kPi;
constexpr double kRollTMax = 4.5 * kPi;
constexpr double kRollHeight = 21.0;

void validate(const ManifoldSpec& spec) {
    switch (spec.kind) {
        case ManifoldKind::unit_cube:
        case ManifoldKind::unit_sphere:
            if (spec.intrinsic_dim < 1) throw InvalidArgument("manifold: intrinsic_dim must be >= 1");
            break;
        case ManifoldKind::unit_sphere_gaussian_mix:
            if (spec.intrinsic_dim < 1) throw InvalidArgument("manifold: intrinsic_dim must be >= 1");
            if (!(spec.mix_sd > 0.0) || !std::isfinite(spec.mix_sd)) throw InvalidArgument("manifold: mix_sd must be > 0");
            if (!(spec.mix_weight >= 0.0 && spec.mix_weight <= 1.0)) {
                throw InvalidArgument("manifold: mix_weight must lie in [0, 1]");
            }
            break;
        case ManifoldKind::mobius_strip:
        case ManifoldKind::swiss_roll:
        case ManifoldKind::paraboloid:
            if (spec.intrinsic_dim != 2) {
                throw InvalidArgument("manifold: " + std::string(to_string(spec.kind)) + " is two-dimensional");
            }
            break;
    }
}

Provenance manifold_meta(const ManifoldSpec& spec, std::size_t n, Seed seed) {
    Provenance meta;
    meta.generator = std::string(to_string(spec.kind));
    meta.params = {{"intrinsic_dim", spec.intrinsic_dim}, {"n", n}, {"seed", seed.value}};
    if (spec.kind == ManifoldKind::unit_sphere_gaussian_mix) {
        meta.params["mix_sd"] = spec.mix_sd;
        meta.params["mix_weight"] = spec.mix_weight;
    }
    return meta;
}

// Draws a parameter pair uniformly w.r.t. surface area by rejection against
// the area element `density`, whose supremum over the box is `bound`.
template <typename Density>
std::array<double, 2> area_uniform(Rng& rng, std::array<double, 2> lo, std::array<double, 2> hi, double bound,
                                   Density density) {
    for (;;) {
        const double a = rng.uniform(lo[0], hi[0]);
        const double b = rng.uniform(lo[1], hi[1]);
        if (rng.uniform() * bound < density(a, b)) return {a, b};
    }
}

}  // namespace

std::string_view to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::unit_cube: return "unit_cube";
        case ManifoldKind::unit_sphere: return "unit_sphere";
        case ManifoldKind::unit_sphere_gaussian_mix: return "unit_sphere_gaussian_mix";
        case ManifoldKind::mobius_strip: return "mobius_strip";
        case ManifoldKind::swiss_roll: return "swiss_roll";
        case ManifoldKind::paraboloid: return "paraboloid";
    }
    return "unknown";
}

std::string_view to_string(FractalKind kind) {
    switch (kind) {
        case FractalKind::sierpinski_triangle: return "sierpinski_triangle";
        case FractalKind::sierpinski_carpet: return "sierpinski_carpet";
        case FractalKind::menger_sponge: return "menger_sponge";
    }
    return "unknown";
}

double hausdorff_dimension(FractalKind kind) {
    switch (kind) {
        case FractalKind::sierpinski_triangle: return std::log(3.0) / std::log(2.0);
        case FractalKind::sierpinski_carpet: return std::log(8.0) / std::log(3.0);
        case FractalKind::menger_sponge: return std::log(20.0) / std::log(3.0);
    }
    return 0.0;
}

int intrinsic_dimension(const ManifoldSpec& spec) { return spec.intrinsic_dim; }

std::size_t ambient_dimension(const ManifoldSpec& spec) {
    switch (spec.kind) {
        case ManifoldKind::unit_cube: return static_cast<std::size_t>(spec.intrinsic_dim);
        case ManifoldKind::unit_sphere:
        case ManifoldKind::unit_sphere_gaussian_mix: return static_cast<std::size_t>(spec.intrinsic_dim) + 1;
        case ManifoldKind::mobius_strip:
        case ManifoldKind::swiss_roll:
        case ManifoldKind::paraboloid: return 3;
    }
    return 0;
}

PointCloud sample_manifold(const ManifoldSpec& spec, std::size_t n, Seed seed) {
    validate(spec);
    if (n < 1) throw InvalidArgument("sample_manifold: n must be >= 1");
    const std::size_t d = ambient_dimension(spec);
    Matrix out(n, d);
    Rng rng(seed);

    switch (spec.kind) {
        case ManifoldKind::unit_cube:
            for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = rng.uniform();
            break;

        case ManifoldKind::unit_sphere:
            for (std::size_t i = 0; i < n; ++i) {
                double norm2 = 0.0;
                do {
                    for (std::size_t k = 0; k < d; ++k) out(i, k) = rng.normal();
                    norm2 = out.row(i).squaredNorm();
                } while (norm2 < 1e-24);
                out.row(i) /= std::sqrt(norm2);
            }
            break;

        case ManifoldKind::unit_sphere_gaussian_mix:
            for (std::size_t i = 0; i < n; ++i) {
                const double pole = rng.uniform() < spec.mix_weight ? 1.0 : -1.0;
                double norm2 = 0.0;
                do {
                    for (std::size_t k = 0; k < d; ++k) out(i, k) = spec.mix_sd * rng.normal();
                    out(i, d - 1) += pole;
                    norm2 = out.row(i).squaredNorm();
                } while (norm2 < 1e-24);
                out.row(i) /= std::sqrt(norm2);
            }
            break;

        case ManifoldKind::mobius_strip: {
            // |r_u x r_v| = sqrt(R^2 + v^2/16) / 2 with R = 1 + (v/2) cos(u/2).
            auto density = [](double u, double v) {
                const double r = 1.0 + 0.5 * v * std::cos(0.5 * u);
                return std::sqrt(r * r + v * v / 16.0);
            };
            const double bound = std::sqrt(2.25 + 1.0 / 16.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto [u, v] = area_uniform(rng, {0.0, -1.0}, {2.0 * kPi, 1.0}, bound, density);
                const double r = 1.0 + 0.5 * v * std::cos(0.5 * u);
                out(i, 0) = r * std::cos(u);
                out(i, 1) = r * std::sin(u);
                out(i, 2) = 0.5 * v * std::sin(0.5 * u);
            }
            break;
        }

        case ManifoldKind::swiss_roll: {
            auto density = [](double t, double) { return std::sqrt(1.0 + t * t); };
            const double bound = std::sqrt(1.0 + kRollTMax * kRollTMax);
            for (std::size_t i = 0; i < n; ++i) {
                const auto [t, y] = area_uniform(rng, {kRollTMin, 0.0}, {kRollTMax, kRollHeight}, bound, density);
                out(i, 0) = t * std::cos(t);
                out(i, 1) = y;
                out(i, 2) = t * std::sin(t);
            }
            break;
        }

        case ManifoldKind::paraboloid: {
            // Graph of x^2 + y^2 over the unit disk; area element sqrt(1 + 4 r^2).
            auto density = [](double x, double y) {
                const double r2 = x * x + y * y;
                return r2 > 1.0 ? 0.0 : std::sqrt(1.0 + 4.0 * r2);
            };
            const double bound = std::sqrt(5.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto [x, y] = area_uniform(rng, {-1.0, -1.0}, {1.0, 1.0}, bound, density);
                out(i, 0) = x;
                out(i, 1) = y;
                out(i, 2) = x * x + y * y;
            }
            break;
        }
    }
    return PointCloud(std::move(out), manifold_meta(spec, n, seed));
}

PointCloud sample_ifs_fractal(const FractalSpec& spec, std::size_t n, Seed seed) {
    if (n < 1) throw InvalidArgument("sample_ifs_fractal: n must be >= 1");
    if (spec.burn_in < 0) throw InvalidArgument("sample_ifs_fractal: burn_in must be >= 0");

    // Every map is x -> x * ratio + offset * ratio with integer cell offsets.
    std::vector<std::array<double, 3>> offsets;
    double ratio = 0.0;
    std::size_t d = 0;
    switch (spec.kind) {
        case FractalKind::sierpinski_triangle:
            ratio = 0.5;
            d = 2;
            offsets = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
            break;
        case FractalKind::sierpinski_carpet:
            ratio = 1.0 / 3.0;
            d = 2;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (!(i == 1 && j == 1)) offsets.push_back({double(i), double(j), 0});
            break;
        case FractalKind::menger_sponge:
            ratio = 1.0 / 3.0;
            d = 3;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        if ((i == 1) + (j == 1) + (k == 1) <= 1) offsets.push_back({double(i), double(j), double(k)});
            break;
    }

    Rng rng(seed);
    std::array<double, 3> x{};
    for (std::size_t k = 0; k < d; ++k) x[k] = rng.uniform();
    auto step = [&] {
        const auto& off = offsets[rng.below(offsets.size())];
        for (std::size_t k = 0; k < d; ++k) x[k] = (x[k] + off[k]) * ratio;
    };
    for (int i = 0; i < spec.burn_in; ++i) step();

    Matrix out(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        step();
        for (std::size_t k = 0; k < d; ++k) out(i, k) = x[k];
    }
    Provenance meta;
    meta.generator = std::string(to_string(spec.kind));
    meta.params = {{"burn_in", spec.burn_in}, {"n", n}, {"seed", seed.value}};
    return PointCloud(std::move(out), std::move(meta));
}

Cascade build_lognormal_cascade(const CascadeSpec& spec, Seed seed) {
    if (spec.levels < 1 || spec.levels > 24) throw InvalidArgument("cascade: levels must lie in [1, 24]");
    if (!std::isfinite(spec.log_mean) || !std::isfinite(spec.log_sd) || spec.log_sd < 0.0) {
        throw InvalidArgument("cascade: log_mean must be finite and log_sd >= 0");
    }
    Rng rng(seed);
    Cascade cascade;
    std::vector<double> mass{1.0};
    for (int level = 0; level < spec.levels; ++level) {
        std::vector<double> weights(mass.size() * 2);
        std::vector<double> next(mass.size() * 2);
        for (std::size_t i = 0; i < weights.size(); ++i) {
            weights[i] = std::exp(spec.log_mean + spec.log_sd * rng.normal());
            next[i] = mass[i / 2] * weights[i];
        }
        cascade.multipliers.push_back(std::move(weights));
        mass = std::move(next);
    }
    cascade.leaf_masses = std::move(mass);
    return cascade;
}

PointCloud sample_lognormal_cascade(const CascadeSpec& spec, Seed seed) {
    const Cascade cascade = build_lognormal_cascade(spec, seed);
    const auto& leaves = cascade.leaf_masses;
    const double peak = *std::max_element(leaves.begin(), leaves.end());

    Matrix out(leaves.size(), 2);
    const double step = 1.0 / static_cast<double>(leaves.size());
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        out(k, 0) = static_cast<double>(k) * step;
        out(k, 1) = leaves[k] / peak;
    }
    Provenance meta;
    meta.generator = "lognormal_cascade";
    meta.params = {{"levels", spec.levels}, {"log_mean", spec.log_mean}, {"log_sd", spec.log_sd}, {"seed", seed.value}};
    return PointCloud(std::move(out), std::move(meta));
}

}  // namespace dimscope
