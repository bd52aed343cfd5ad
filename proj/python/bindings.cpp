#include <cmath>
#include <map>
#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dimscope/brito.hpp"
#include "dimscope/error.hpp"
#include "dimscope/geometry.hpp"
#include "dimscope/lsa.hpp"
#include "dimscope/mst.hpp"
#include "dimscope/parallel.hpp"
#include "dimscope/schweinhart.hpp"

namespace py = pybind11;
using namespace dimscope;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PointCloud to_cloud(const Eigen::Ref<const RowMatrix>& points) { return PointCloud(Matrix(points)); }

ManifoldKind manifold_kind(const std::string& name) {
    static const std::map<std::string, ManifoldKind> kinds = {
        {"unit-cube", ManifoldKind::unit_cube},     {"unit-sphere", ManifoldKind::unit_sphere},
        {"unit-sphere-gauss", ManifoldKind::unit_sphere_gaussian_mix},
        {"mobius", ManifoldKind::mobius_strip},     {"swiss-roll", ManifoldKind::swiss_roll},
        {"paraboloid", ManifoldKind::paraboloid},
    };
    const auto it = kinds.find(name);
    if (it == kinds.end()) throw InvalidArgument("unknown manifold: " + name);
    return it->second;
}

FractalKind fractal_kind(const std::string& name) {
    static const std::map<std::string, FractalKind> kinds = {
        {"sierpinski-triangle", FractalKind::sierpinski_triangle},
        {"sierpinski-carpet", FractalKind::sierpinski_carpet},
        {"menger-sponge", FractalKind::menger_sponge},
    };
    const auto it = kinds.find(name);
    if (it == kinds.end()) throw InvalidArgument("unknown fractal: " + name);
    return it->second;
}

MstAlgorithm mst_algorithm(const std::string& name) {
    if (name == "auto") return MstAlgorithm::automatic;
    if (name == "prim") return MstAlgorithm::prim;
    if (name == "boruvka") return MstAlgorithm::boruvka_kdtree;
    throw InvalidArgument("unknown MST algorithm: " + name);
}

py::object optional_real(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::object real_or_none(double v) { return std::isfinite(v) ? py::cast(v) : py::none(); }

py::dict record_dict(const FitRecord& r) {
    py::dict d;
    d["alpha"] = r.alpha;
    d["d_hat"] = real_or_none(r.d_hat);
    d["slope"] = real_or_none(r.slope);
    d["intercept"] = real_or_none(r.intercept);
    d["ci_low"] = real_or_none(r.ci_low);
    d["ci_high"] = std::isnan(r.ci_high) ? py::none() : py::cast(r.ci_high);
    d["line_ci_rel"] = r.line_ci_rel;
    d["param_ci_rel"] = r.param_ci_rel;
    d["admissible"] = r.admissible;
    d["rejection_reason"] = std::string(to_string(r.rejection_reason));
    return d;
}

Corpus to_corpus(const std::vector<std::vector<std::string>>& documents) {
    Corpus c;
    c.documents = documents;
    for (std::size_t i = 0; i < documents.size(); ++i) c.ids.push_back(std::to_string(i));
    return c;
}

EmbeddingTable to_table(const std::vector<std::string>& tokens, const Eigen::Ref<const RowMatrix>& vectors) {
    if (static_cast<Eigen::Index>(tokens.size()) != vectors.rows()) {
        throw InvalidArgument("tokens and vectors disagree on the number of rows");
    }
    EmbeddingTable t;
    t.tokens = tokens;
    t.vectors = vectors;
    return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Intrinsic dimension estimation from Euclidean minimum spanning trees";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<DegenerateFit>(m, "DegenerateFit", PyExc_ArithmeticError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<OutOfRange>(m, "OutOfRange", PyExc_ArithmeticError);

    m.def("set_threads", [](unsigned n) { set_thread_count(n); }, py::arg("n"));

    m.def(
        "sample_manifold",
        [](const std::string& kind, std::size_t n, std::uint64_t seed, std::optional<int> intrinsic_dim,
           double mix_sd, double mix_weight) {
            ManifoldSpec spec;
            spec.kind = manifold_kind(kind);
            spec.intrinsic_dim = intrinsic_dim.value_or(spec.kind == ManifoldKind::unit_cube ? 3 : 2);
            spec.mix_sd = mix_sd;
            spec.mix_weight = mix_weight;
            return RowMatrix(sample_manifold(spec, n, Seed{seed}).points());
        },
        py::arg("kind"), py::arg("n"), py::arg("seed") = 0, py::arg("intrinsic_dim") = py::none(),
        py::arg("mix_sd") = 0.5, py::arg("mix_weight") = 0.5);

    m.def(
        "sample_fractal",
        [](const std::string& kind, std::size_t n, std::uint64_t seed, int burn_in) {
            return RowMatrix(sample_ifs_fractal({fractal_kind(kind), burn_in}, n, Seed{seed}).points());
        },
        py::arg("kind"), py::arg("n"), py::arg("seed") = 0, py::arg("burn_in") = 100);

    m.def(
        "sample_cascade",
        [](int levels, std::uint64_t seed, double log_sd) {
            CascadeSpec spec;
            spec.levels = levels;
            spec.log_sd = log_sd;
            spec.log_mean = -std::log(2.0) - 0.5 * log_sd * log_sd;
            return RowMatrix(sample_lognormal_cascade(spec, Seed{seed}).points());
        },
        py::arg("levels"), py::arg("seed") = 0, py::arg("log_sd") = 0.6);

    m.def(
        "hausdorff_dimension", [](const std::string& kind) { return hausdorff_dimension(fractal_kind(kind)); },
        py::arg("kind"));

    m.def(
        "lift_dimension",
        [](const Eigen::Ref<const RowMatrix>& points, std::size_t target_d) {
            return RowMatrix(lift_dimension(to_cloud(points), target_d).points());
        },
        py::arg("points"), py::arg("target_d"));

    m.def(
        "add_gaussian_noise",
        [](const Eigen::Ref<const RowMatrix>& points, double sigma, std::uint64_t seed) {
            return RowMatrix(add_gaussian_noise(to_cloud(points), sigma, Seed{seed}).points());
        },
        py::arg("points"), py::arg("sigma"), py::arg("seed") = 0);

    m.def(
        "add_uniform_background",
        [](const Eigen::Ref<const RowMatrix>& points, double fraction, std::uint64_t seed) {
            return RowMatrix(add_uniform_background(to_cloud(points), fraction, Seed{seed}).points());
        },
        py::arg("points"), py::arg("fraction"), py::arg("seed") = 0);

    m.def(
        "emst",
        [](const Eigen::Ref<const RowMatrix>& points, const std::string& algorithm) {
            const MinimumSpanningTree tree = build_emst(to_cloud(points), mst_algorithm(algorithm));
            Eigen::Matrix<std::int64_t, Eigen::Dynamic, 2, Eigen::RowMajor> edges(tree.edges().size(), 2);
            Eigen::VectorXd weights(tree.edges().size());
            for (std::size_t i = 0; i < tree.edges().size(); ++i) {
                edges(i, 0) = tree.edges()[i].u;
                edges(i, 1) = tree.edges()[i].v;
                weights(i) = tree.edges()[i].weight;
            }
            return py::make_tuple(edges, weights);
        },
        py::arg("points"), py::arg("algorithm") = "auto",
        "Edges (u < v) sorted by (weight, u, v) and their lengths.");

    m.def(
        "mst_stats",
        [](const Eigen::Ref<const RowMatrix>& points, const std::vector<double>& alphas) {
            const MinimumSpanningTree tree = build_emst(to_cloud(points));
            py::dict d;
            d["n"] = tree.n();
            d["total_weight"] = tree.total_weight();
            d["degree_statistic"] = degree_statistic(tree);
            d["degree_histogram"] = degree_histogram(tree);
            py::dict sums;
            for (double a : alphas) sums[py::float_(a)] = edge_power_sum(tree, a);
            d["edge_power_sums"] = sums;
            return d;
        },
        py::arg("points"), py::arg("alphas") = std::vector<double>{1.0});

    m.def(
        "schweinhart",
        [](const Eigen::Ref<const RowMatrix>& points, double alpha_start, double alpha_stop, double alpha_step,
           double gamma, std::optional<std::size_t> n_min, std::size_t size_count,
           std::optional<std::vector<std::size_t>> sizes, int replicates, std::uint64_t seed) {
            const PointCloud cloud = to_cloud(points);
            SizeSchedule schedule;
            if (sizes) {
                schedule = {*sizes, replicates};
            } else {
                const std::size_t fallback = cloud.n() >= 4000 ? 2000 : std::max<std::size_t>(2, cloud.n() / 25);
                schedule = schedule_sizes(cloud.n(), n_min.value_or(fallback), size_count, replicates);
            }
            const SchweinhartReport r =
                sweep_alpha(cloud, {alpha_start, alpha_stop, alpha_step}, schedule, gamma, Seed{seed});
            py::dict d;
            d["sizes"] = schedule.sizes;
            d["gamma"] = r.gamma;
            d["d_min"] = optional_real(r.d_min);
            d["d_max"] = optional_real(r.d_max);
            d["admissible_alpha"] = r.admissible_alpha;
            py::list records;
            for (const auto& rec : r.records) records.append(record_dict(rec));
            d["records"] = records;
            return d;
        },
        py::arg("points"), py::arg("alpha_start") = 1e-4, py::arg("alpha_stop") = 10.0, py::arg("alpha_step") = 0.1,
        py::arg("gamma") = 0.1, py::arg("n_min") = py::none(), py::arg("size_count") = 8,
        py::arg("sizes") = py::none(), py::arg("replicates") = 3, py::arg("seed") = 0);

    m.def(
        "fit_log_log",
        [](double alpha, const std::vector<double>& log_sizes, const std::vector<double>& log_values, double gamma) {
            return record_dict(fit_log_log(alpha, log_sizes, log_values, gamma));
        },
        py::arg("alpha"), py::arg("log_sizes"), py::arg("log_values"), py::arg("gamma") = 0.1);

    m.def(
        "brito_calibrate",
        [](int lo, int hi, std::size_t n_cal, std::size_t L, std::uint64_t seed) {
            return calibration_to_json(calibrate(lo, hi, n_cal, L, Seed{seed})).dump();
        },
        py::arg("lo") = 2, py::arg("hi") = 15, py::arg("n_cal") = 2000, py::arg("L") = 100, py::arg("seed") = 0,
        "Calibration table as a JSON string.");

    m.def(
        "brito_estimate",
        [](const Eigen::Ref<const RowMatrix>& points, const std::string& calibration) {
            const BritoCalibration calib = calibration_from_json(nlohmann::json::parse(calibration));
            const BritoEstimate e = estimate(to_cloud(points), calib);
            py::dict d;
            d["m_prime"] = e.m_prime;
            d["n_prime"] = e.n_prime;
            d["posterior"] = e.posterior;
            d["expected_dim"] = e.expected_dim;
            d["d_bqy"] = e.d_bqy;
            return d;
        },
        py::arg("points"), py::arg("calibration"));

    m.def(
        "embed_words",
        [](const std::vector<std::vector<std::string>>& documents, std::size_t d,
           const std::vector<std::string>& stopwords) {
            const TokenSet stop(stopwords.begin(), stopwords.end());
            const CountMatrix counts = count_matrix(to_corpus(documents), stop);
            const EmbeddingTable t = embed_words(counts, weight_matrix(counts, entropy_weights(counts)), d);
            return py::make_tuple(t.tokens, RowMatrix(t.vectors), t.singular_values);
        },
        py::arg("documents"), py::arg("d") = 15, py::arg("stopwords") = std::vector<std::string>{},
        "LSA embeddings: (tokens, vectors, singular values).");

    m.def(
        "ngram_embeddings",
        [](const std::vector<std::vector<std::string>>& documents, const std::vector<std::string>& tokens,
           const Eigen::Ref<const RowMatrix>& vectors, std::size_t n) {
            const NgramEmbeddings g = ngram_embeddings(to_corpus(documents), to_table(tokens, vectors), n);
            return py::make_tuple(g.table.tokens, RowMatrix(g.table.vectors), g.oov_skipped);
        },
        py::arg("documents"), py::arg("tokens"), py::arg("vectors"), py::arg("n"),
        "Unique n-grams, their concatenated embeddings and the skipped count.");
}
