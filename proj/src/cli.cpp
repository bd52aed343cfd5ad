#include "dimscope/cli.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dimscope/brito.hpp"
#include "dimscope/cloud_io.hpp"
#include "dimscope/error.hpp"
#include "dimscope/geometry.hpp"
#include "dimscope/lsa.hpp"
#include "dimscope/manifest.hpp"
#include "dimscope/mst.hpp"
#include "dimscope/parallel.hpp"
#include "dimscope/schweinhart.hpp"

namespace dimscope {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

// Top-level key=value lines apply to whichever subcommand runs; [section]
// blocks still target one subcommand.
class FlatConfig : public CLI::ConfigTOML {
public:
    explicit FlatConfig(std::vector<std::string> subcommands) : subcommands_(std::move(subcommands)) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::vector<CLI::ConfigItem> out;
        for (auto& item : CLI::ConfigTOML::from_config(input)) {
            if (!item.parents.empty() || item.name == "++" || item.name == "--") {
                out.push_back(std::move(item));
                continue;
            }
            for (const auto& sub : subcommands_) {
                CLI::ConfigItem copy = item;
                copy.parents = {sub};
                out.push_back(std::move(copy));
            }
        }
        return out;
    }

private:
    std::vector<std::string> subcommands_;
};

fs::path with_extension(fs::path path, const std::string& ext) { return path.replace_extension(ext); }

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw FormatError("write failed: " + path.string());
}

std::ofstream open_text(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    return out;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json input_block(const fs::path& path, const PointCloud& cloud) {
    return {{"path", path.string()}, {"sha256", sha256_file(path)}, {"n", cloud.n()}, {"d", cloud.d()}};
}

CloudFormat resolve_format(const std::string& flag, const fs::path& out) {
    if (flag == "csv") return CloudFormat::csv;
    if (flag == "bin") return CloudFormat::binary;
    return format_for_path(out);
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
    std::string object;
    std::size_t n = 100000;
    std::optional<int> intrinsic_dim;
    std::optional<std::size_t> d_target;
    double noise_gauss = 0.0;
    double noise_uniform_frac = 0.0;
    std::uint64_t seed = 0;
    fs::path out;
    std::string format = "auto";
    int burn_in = 100;
    double mix_sd = 0.5;
    double mix_weight = 0.5;
    double log_sd = 0.6;
    bool n_given = false;
};

PointCloud load_input(const fs::path& path, bool dedup, RunManifest& manifest) {
    PointCloud cloud = read_cloud(path);
    manifest.add_input(path);
    return dedup ? deduplicate(cloud) : cloud;
}

PointCloud sample_object(const SampleOptions& o) {
    static const std::map<std::string, ManifoldKind> manifolds = {
        {"unit-cube", ManifoldKind::unit_cube},       {"unit-sphere", ManifoldKind::unit_sphere},
        {"unit-sphere-gauss", ManifoldKind::unit_sphere_gaussian_mix},
        {"mobius", ManifoldKind::mobius_strip},       {"swiss-roll", ManifoldKind::swiss_roll},
        {"paraboloid", ManifoldKind::paraboloid},
    };
    static const std::map<std::string, FractalKind> fractals = {
        {"sierpinski-triangle", FractalKind::sierpinski_triangle},
        {"sierpinski-carpet", FractalKind::sierpinski_carpet},
        {"menger-sponge", FractalKind::menger_sponge},
    };
    const Seed seed{o.seed};
    if (const auto it = manifolds.find(o.object); it != manifolds.end()) {
        ManifoldSpec spec;
        spec.kind = it->second;
        const bool variable = spec.kind == ManifoldKind::unit_cube || spec.kind == ManifoldKind::unit_sphere ||
                              spec.kind == ManifoldKind::unit_sphere_gaussian_mix;
        spec.intrinsic_dim = spec.kind == ManifoldKind::unit_cube ? 3 : 2;
        if (o.intrinsic_dim) {
            if (!variable && *o.intrinsic_dim != 2) {
                throw InvalidArgument("--intrinsic-dim is fixed at 2 for " + o.object);
            }
            spec.intrinsic_dim = *o.intrinsic_dim;
        }
        spec.mix_sd = o.mix_sd;
        spec.mix_weight = o.mix_weight;
        return sample_manifold(spec, o.n, seed);
    }
    if (const auto it = fractals.find(o.object); it != fractals.end()) {
        if (o.intrinsic_dim) throw InvalidArgument("--intrinsic-dim does not apply to " + o.object);
        return sample_ifs_fractal(FractalSpec{it->second, o.burn_in}, o.n, seed);
    }
    if (o.object == "lognormal-cascade") {
        if (o.intrinsic_dim) throw InvalidArgument("--intrinsic-dim does not apply to " + o.object);
        CascadeSpec spec;
        spec.log_sd = o.log_sd;
        spec.log_mean = -std::log(2.0) - 0.5 * o.log_sd * o.log_sd;
        if (o.n_given) {
            if (o.n < 2 || (o.n & (o.n - 1)) != 0) throw InvalidArgument("lognormal-cascade needs --n a power of two");
            spec.levels = std::countr_zero(o.n);
        }
        return sample_lognormal_cascade(spec, seed);
    }
    throw InvalidArgument("unknown --object " + o.object);
}

int cmd_sample(const SampleOptions& o, RunManifest& manifest, std::ostream& out) {
    if (o.noise_gauss < 0.0) throw InvalidArgument("--noise-gauss must be >= 0");
    if (o.noise_uniform_frac < 0.0) throw InvalidArgument("--noise-uniform-frac must be >= 0");
    PointCloud cloud = sample_object(o);
    manifest.add_seed("sample", o.seed);
    if (o.d_target && *o.d_target != cloud.d()) cloud = lift_dimension(cloud, *o.d_target);
    if (o.noise_gauss > 0.0) {
        const Seed s = derive_seed(Seed{o.seed}, "cli.noise_gauss");
        manifest.add_seed("noise_gauss", s.value);
        cloud = add_gaussian_noise(cloud, o.noise_gauss, s);
    }
    if (o.noise_uniform_frac > 0.0) {
        const Seed s = derive_seed(Seed{o.seed}, "cli.noise_uniform");
        manifest.add_seed("noise_uniform", s.value);
        cloud = add_uniform_background(cloud, o.noise_uniform_frac, s);
    }
    write_cloud(o.out, cloud, resolve_format(o.format, o.out));
    manifest.add_output(o.out);
    manifest.write(o.out);
    out << o.object << ": " << cloud.n() << " x " << cloud.d() << " -> " << o.out.string() << '\n';
    return kExitOk;
}

// ----------------------------------------------------------- schweinhart

struct SchweinhartOptions {
    fs::path cloud;
    double alpha_start = 1e-4;
    double alpha_stop = 10.0;
    double alpha_step = 0.1;
    double gamma = 0.1;
    std::optional<std::size_t> n_min;
    std::size_t size_count = 8;
    std::vector<std::size_t> sizes;
    int replicates = 3;
    std::uint64_t seed = 0;
    fs::path out;
    fs::path csv;
    bool dedup = false;
};

json record_json(const FitRecord& r) {
    return {{"alpha", r.alpha},
            {"d_hat", number_or_null(r.d_hat)},
            {"ci_low", number_or_null(r.ci_low)},
            {"ci_high", number_or_null(r.ci_high)},
            {"slope", number_or_null(r.slope)},
            {"intercept", number_or_null(r.intercept)},
            {"slope_ci_low", number_or_null(r.slope_ci_low)},
            {"slope_ci_high", number_or_null(r.slope_ci_high)},
            {"line_ci_rel", number_or_null(r.line_ci_rel)},
            {"param_ci_rel", number_or_null(r.param_ci_rel)},
            {"admissible", r.admissible},
            {"rejection_reason", std::string(to_string(r.rejection_reason))}};
}

int cmd_schweinhart(const SchweinhartOptions& o, RunManifest& manifest, std::ostream& out, std::ostream& err) {
    const PointCloud cloud = load_input(o.cloud, o.dedup, manifest);
    SizeSchedule schedule;
    if (!o.sizes.empty()) {
        schedule = SizeSchedule{o.sizes, o.replicates};
    } else {
        // 2000 unless the cloud is too small to leave room above it.
        const std::size_t fallback = cloud.n() >= 4000 ? 2000 : std::max<std::size_t>(2, cloud.n() / 25);
        schedule = schedule_sizes(cloud.n(), o.n_min.value_or(fallback), o.size_count, o.replicates);
    }
    validate_schedule(schedule, cloud.n());
    manifest.add_seed("subsample", o.seed);

    const AlphaGrid grid{o.alpha_start, o.alpha_stop, o.alpha_step};
    const TreeBank bank = grow_trees(cloud, schedule, Seed{o.seed});
    const SchweinhartReport report = sweep_alpha(bank, grid, o.gamma);

    json records = json::array();
    json admissible = json::array();
    for (const auto& r : report.records) {
        records.push_back(record_json(r));
        if (r.admissible) {
            admissible.push_back({{"alpha", r.alpha}, {"d_hat", r.d_hat}, {"ci_low", r.ci_low}, {"ci_high", r.ci_high}});
        }
    }
    json runs = json::array();
    for (const auto& [a, b] : report.admissible_alpha) runs.push_back({a, b});
    const fs::path csv_path = o.csv.empty() ? with_extension(o.out, ".csv") : o.csv;
    const json doc = {
        {"schema_version", kSchemaVersion},
        {"kind", "schweinhart"},
        {"manifest", RunManifest::name_for(o.out)},
        {"input", input_block(o.cloud, cloud)},
        {"grid", {{"start", grid.start}, {"stop", grid.stop}, {"step", grid.step}}},
        {"gamma", report.gamma},
        {"schedule", {{"sizes", schedule.sizes}, {"replicates", schedule.replicates}}},
        {"seed", o.seed},
        {"d_min", report.d_min ? json(*report.d_min) : json(nullptr)},
        {"d_max", report.d_max ? json(*report.d_max) : json(nullptr)},
        {"admissible_alpha_runs", runs},
        {"admissible", admissible},
        {"curve_csv", csv_path.filename().string()},
        {"records", records},
    };
    write_json(o.out, doc);
    {
        auto csv = open_text(csv_path);
        csv << "alpha,d_hat,ci_low,ci_high,admissible,rejection_reason\n";
        for (const auto& r : report.records) {
            csv << format_real(r.alpha) << ',' << format_real(r.d_hat) << ',' << format_real(r.ci_low) << ','
                << format_real(r.ci_high) << ',' << (r.admissible ? 1 : 0) << ',' << to_string(r.rejection_reason)
                << '\n';
        }
    }
    manifest.add_output(o.out);
    manifest.add_output(csv_path);
    manifest.write(o.out);
    if (report.d_min) {
        out << "admissible d_hat in [" << format_real(*report.d_min) << ", " << format_real(*report.d_max) << "] over "
            << admissible.size() << " of " << report.records.size() << " alpha values\n";
    } else {
        err << "warning: no admissible alpha; report lists every rejection\n";
    }
    return kExitOk;
}

// ----------------------------------------------------------------- brito

struct CalibrateOptions {
    std::string dims = "2..15";
    std::size_t n_cal = 2000;
    std::size_t L = 100;
    std::uint64_t seed = 0;
    fs::path out;
};

std::pair<int, int> parse_dims(const std::string& text) {
    const auto sep = text.find("..");
    try {
        if (sep == std::string::npos) {
            const int d = std::stoi(text);
            return {d, d};
        }
        return {std::stoi(text.substr(0, sep)), std::stoi(text.substr(sep + 2))};
    } catch (const std::logic_error&) {
        throw InvalidArgument("--dims expects LO..HI, got '" + text + "'");
    }
}

int cmd_calibrate(const CalibrateOptions& o, RunManifest& manifest, std::ostream& out) {
    const auto [lo, hi] = parse_dims(o.dims);
    manifest.add_seed("calibration", o.seed);
    const BritoCalibration calib = calibrate(lo, hi, o.n_cal, o.L, Seed{o.seed});
    save_calibration(o.out, calib);
    manifest.add_output(o.out);
    manifest.write(o.out);
    out << "calibrated dims " << lo << ".." << hi << " -> " << o.out.string() << '\n';
    return kExitOk;
}

struct BritoOptions {
    fs::path cloud;
    fs::path calib;
    std::vector<std::size_t> sizes;
    std::uint64_t seed = 0;
    fs::path out;
    fs::path curve;
    bool dedup = false;
};

int cmd_brito(const BritoOptions& o, RunManifest& manifest, std::ostream& out) {
    const BritoCalibration calib = load_calibration(o.calib);
    manifest.add_input(o.calib);
    const PointCloud cloud = load_input(o.cloud, o.dedup, manifest);
    manifest.add_seed("subsample", o.seed);

    const BritoEstimate est = estimate(cloud, calib);
    std::vector<std::size_t> sizes = o.sizes;
    if (sizes.empty() || sizes.back() != cloud.n()) sizes.push_back(cloud.n());
    const auto curve = convergence_curve(cloud, sizes, calib, Seed{o.seed});

    json posterior = json::array();
    for (const auto& [dim, p] : est.posterior) posterior.push_back({{"dim", dim}, {"p", p}});
    json curve_json = json::array();
    for (const auto& c : curve) {
        curve_json.push_back({{"size", c.size}, {"expected_dim", c.expected_dim}, {"d_bqy", c.d_bqy}});
    }
    const fs::path curve_path = o.curve.empty() ? with_extension(o.out, ".csv") : o.curve;
    const json doc = {
        {"schema_version", kSchemaVersion},
        {"kind", "brito"},
        {"manifest", RunManifest::name_for(o.out)},
        {"input", input_block(o.cloud, cloud)},
        {"calibration",
         {{"path", o.calib.string()},
          {"dims", {calib.min_dim(), calib.max_dim()}},
          {"n_cal", calib.n_cal},
          {"L", calib.L}}},
        {"seed", o.seed},
        {"m_prime", est.m_prime},
        {"n_prime", est.n_prime},
        {"posterior", posterior},
        {"expected_dim", est.expected_dim},
        {"d_bqy", est.d_bqy},
        {"curve_csv", curve_path.filename().string()},
        {"curve", curve_json},
    };
    write_json(o.out, doc);
    {
        auto csv = open_text(curve_path);
        csv << "size,expected_dim,d_bqy\n";
        for (const auto& c : curve) csv << c.size << ',' << format_real(c.expected_dim) << ',' << c.d_bqy << '\n';
    }
    manifest.add_output(o.out);
    manifest.add_output(curve_path);
    manifest.write(o.out);
    out << "d_bqy = " << est.d_bqy << " (expected " << format_real(est.expected_dim) << ")\n";
    return kExitOk;
}

// ------------------------------------------------------------------- lsa

struct EmbedOptions {
    fs::path corpus;
    fs::path stopwords;
    std::size_t d = 15;
    std::vector<std::size_t> truncate;
    fs::path out;
};

fs::path truncated_path(const fs::path& out, std::size_t d2) {
    return out.parent_path() / (out.stem().string() + ".d" + std::to_string(d2) + out.extension().string());
}

int cmd_embed(const EmbedOptions& o, RunManifest& manifest, std::ostream& out, std::ostream& err) {
    const Corpus corpus = load_corpus(o.corpus);
    manifest.add_input(o.corpus);
    TokenSet stop;
    if (!o.stopwords.empty()) {
        stop = load_stopwords(o.stopwords);
        manifest.add_input(o.stopwords);
    }
    const CountMatrix counts = count_matrix(corpus, stop);
    if (counts.dropped_documents > 0) {
        err << "warning: " << counts.dropped_documents << " documents empty after stopword filtering were dropped\n";
    }
    const Eigen::VectorXd eps = entropy_weights(counts);
    const auto W = weight_matrix(counts, eps);
    const EmbeddingTable table = embed_words(counts, W, o.d);
    write_embeddings(o.out, table);
    manifest.add_output(o.out);
    for (std::size_t d2 : o.truncate) {
        const fs::path p = truncated_path(o.out, d2);
        write_embeddings(p, truncate_embeddings(table, d2));
        manifest.add_output(p);
    }
    manifest.add_note("vocabulary", counts.words());
    manifest.add_note("documents", counts.docs());
    manifest.add_note("dropped_documents", counts.dropped_documents);
    manifest.write(o.out);
    out << counts.words() << " words x " << counts.docs() << " documents -> d = " << o.d << '\n';
    return kExitOk;
}

struct NgramOptions {
    fs::path table;
    fs::path corpus;
    fs::path stopwords;
    std::size_t n = 1;
    std::optional<std::size_t> truncate;
    fs::path out;
    std::string format = "auto";
};

int cmd_ngrams(const NgramOptions& o, RunManifest& manifest, std::ostream& out, std::ostream& err) {
    EmbeddingTable table = read_embeddings(o.table);
    manifest.add_input(o.table);
    if (o.truncate) table = truncate_embeddings(table, *o.truncate);
    Corpus corpus = load_corpus(o.corpus);
    manifest.add_input(o.corpus);
    if (!o.stopwords.empty()) {
        corpus = filter_stopwords(corpus, load_stopwords(o.stopwords));
        manifest.add_input(o.stopwords);
    }
    const NgramEmbeddings grams = ngram_embeddings(corpus, table, o.n);
    if (grams.oov_skipped > 0) err << "warning: skipped " << grams.oov_skipped << " n-grams with unknown tokens\n";
    if (grams.table.size() == 0) throw InvalidArgument("no n-grams of length " + std::to_string(o.n) + " in corpus");
    Provenance meta{"ngrams", {{"n", o.n}, {"d", table.dim()}}, {}};
    write_cloud(o.out, to_point_cloud(grams.table, meta), resolve_format(o.format, o.out));
    manifest.add_output(o.out);
    manifest.add_note("ngrams", grams.table.size());
    manifest.add_note("oov_skipped", grams.oov_skipped);
    manifest.write(o.out);
    out << grams.table.size() << " unique " << o.n << "-grams x " << grams.table.dim() << " -> " << o.out.string()
        << '\n';
    return kExitOk;
}

// ------------------------------------------------------------- mst-stats

struct MstOptions {
    fs::path cloud;
    std::vector<double> alphas{1.0};
    std::string algorithm = "auto";
    fs::path out;
    fs::path summary;
    bool dedup = false;
};

int cmd_mst(const MstOptions& o, RunManifest& manifest, std::ostream& out) {
    const PointCloud cloud = load_input(o.cloud, o.dedup, manifest);
    const MstAlgorithm algo = o.algorithm == "prim"      ? MstAlgorithm::prim
                              : o.algorithm == "boruvka" ? MstAlgorithm::boruvka_kdtree
                                                         : MstAlgorithm::automatic;
    const MinimumSpanningTree tree = build_emst(cloud, algo);
    {
        auto csv = open_text(o.out);
        csv << "u,v,weight\n";
        for (const auto& e : tree.edges()) csv << e.u << ',' << e.v << ',' << format_real(e.weight) << '\n';
    }
    json sums = json::array();
    for (double a : o.alphas) sums.push_back({{"alpha", a}, {"E", edge_power_sum(tree, a)}});
    const fs::path summary = o.summary.empty() ? with_extension(o.out, ".json") : o.summary;
    const json doc = {
        {"schema_version", kSchemaVersion},
        {"kind", "mst-stats"},
        {"manifest", RunManifest::name_for(o.out)},
        {"input", input_block(o.cloud, cloud)},
        {"edges_csv", o.out.filename().string()},
        {"n", tree.n()},
        {"total_weight", tree.total_weight()},
        {"degree_statistic", degree_statistic(tree)},
        {"degree_histogram", degree_histogram(tree)},
        {"edge_power_sums", sums},
    };
    write_json(summary, doc);
    manifest.add_output(o.out);
    manifest.add_output(summary);
    manifest.write(o.out);
    out << "total weight " << format_real(tree.total_weight()) << ", degree statistic "
        << format_real(degree_statistic(tree)) << '\n';
    return kExitOk;
}

unsigned default_threads() {
    if (const char* env = std::getenv("DIMSCOPE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::logic_error&) {
        }
    }
    return thread_count();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Intrinsic dimension of point clouds from Euclidean minimum spanning trees", "dimscope"};
    app.set_version_flag("--version", std::string(DIMSCOPE_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = default_threads();
    app.add_option("--threads", threads, "Worker threads (default: $DIMSCOPE_THREADS or all cores)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* config_opt = app.set_config("--config", "", "key=value file mirroring the flags; flags win");

    SampleOptions so;
    auto* sample = app.add_subcommand("sample", "Sample a synthetic point cloud");
    sample->add_option("--object", so.object, "Object to sample")
        ->required()
        ->check(CLI::IsMember({"unit-cube", "unit-sphere", "unit-sphere-gauss", "mobius", "swiss-roll", "paraboloid",
                               "sierpinski-triangle", "sierpinski-carpet", "menger-sponge", "lognormal-cascade"}));
    auto* n_opt = sample->add_option("--n", so.n, "Number of points")->capture_default_str();
    sample->add_option("--intrinsic-dim", so.intrinsic_dim, "Cube side count or sphere dimension");
    sample->add_option("--d-target", so.d_target, "Lift to this ambient dimension");
    sample->add_option("--noise-gauss", so.noise_gauss, "Gaussian noise standard deviation")->capture_default_str();
    sample->add_option("--noise-uniform-frac", so.noise_uniform_frac, "Uniform background fraction")
        ->capture_default_str();
    sample->add_option("--seed", so.seed)->capture_default_str();
    sample->add_option("--out", so.out)->required();
    sample->add_option("--format", so.format)->check(CLI::IsMember({"auto", "csv", "bin"}))->capture_default_str();
    sample->add_option("--burn-in", so.burn_in, "Chaos-game burn-in iterations")->capture_default_str();
    sample->add_option("--mix-sd", so.mix_sd)->capture_default_str();
    sample->add_option("--mix-weight", so.mix_weight)->capture_default_str();
    sample->add_option("--log-sd", so.log_sd, "Cascade log-multiplier standard deviation")->capture_default_str();

    SchweinhartOptions sw;
    auto* schw = app.add_subcommand("schweinhart", "Edge-power dimension estimate over an alpha grid");
    schw->add_option("cloud", sw.cloud)->required()->check(CLI::ExistingFile);
    schw->add_option("--alpha-start", sw.alpha_start)->capture_default_str();
    schw->add_option("--alpha-stop", sw.alpha_stop)->capture_default_str();
    schw->add_option("--alpha-step", sw.alpha_step)->capture_default_str();
    schw->add_option("--gamma", sw.gamma)->capture_default_str();
    schw->add_option("--n-min", sw.n_min, "Smallest subsample (default 2000, or n/25 below 4000 points)");
    schw->add_option("--size-count", sw.size_count, "Number of sizes from n-min to n")->capture_default_str();
    schw->add_option("--sizes", sw.sizes, "Explicit subsample sizes")->delimiter(',');
    schw->add_option("--replicates", sw.replicates)->capture_default_str();
    schw->add_option("--seed", sw.seed)->capture_default_str();
    schw->add_option("--out", sw.out, "Report JSON")->required();
    schw->add_option("--csv", sw.csv, "Curve CSV (default: --out with .csv)");
    schw->add_flag("--dedup", sw.dedup, "Drop duplicate points first");

    CalibrateOptions co;
    auto* cal = app.add_subcommand("brito-calibrate", "Monte Carlo calibration on unit hypercubes");
    cal->add_option("--dims", co.dims, "Candidate dimensions LO..HI")->capture_default_str();
    cal->add_option("--n-cal", co.n_cal)->capture_default_str();
    cal->add_option("--L", co.L)->capture_default_str();
    cal->add_option("--seed", co.seed)->capture_default_str();
    cal->add_option("--out", co.out)->required();

    BritoOptions bo;
    auto* brito = app.add_subcommand("brito", "Degree-statistic Bayesian dimension estimate");
    brito->add_option("cloud", bo.cloud)->required()->check(CLI::ExistingFile);
    brito->add_option("--calib", bo.calib)->required()->check(CLI::ExistingFile);
    brito->add_option("--sizes", bo.sizes, "Convergence-curve sizes")->delimiter(',');
    brito->add_option("--seed", bo.seed)->capture_default_str();
    brito->add_option("--out", bo.out, "Estimate JSON")->required();
    brito->add_option("--curve", bo.curve, "Curve CSV (default: --out with .csv)");
    brito->add_flag("--dedup", bo.dedup, "Drop duplicate points first");

    EmbedOptions eo;
    auto* embed = app.add_subcommand("embed", "LSA word embeddings from a tokenised corpus");
    embed->add_option("corpus", eo.corpus, "Directory of token files or JSONL")->required()->check(CLI::ExistingPath);
    embed->add_option("--stopwords", eo.stopwords)->check(CLI::ExistingFile);
    embed->add_option("--d", eo.d)->capture_default_str();
    embed->add_option("--truncate", eo.truncate, "Also write tables truncated to these dims")->delimiter(',');
    embed->add_option("--out", eo.out, "Embedding TSV")->required();

    NgramOptions no;
    auto* ngrams = app.add_subcommand("ngrams", "Point cloud of concatenated n-gram embeddings");
    ngrams->add_option("table", no.table, "Embedding TSV")->required()->check(CLI::ExistingFile);
    ngrams->add_option("--corpus", no.corpus)->required()->check(CLI::ExistingPath);
    ngrams->add_option("--stopwords", no.stopwords)->check(CLI::ExistingFile);
    ngrams->add_option("--n", no.n)->check(CLI::PositiveNumber)->capture_default_str();
    ngrams->add_option("--truncate", no.truncate, "Use the first coordinates of the table only");
    ngrams->add_option("--out", no.out)->required();
    ngrams->add_option("--format", no.format)->check(CLI::IsMember({"auto", "csv", "bin"}))->capture_default_str();

    MstOptions mo;
    auto* mst = app.add_subcommand("mst-stats", "Euclidean MST edges and statistics");
    mst->add_option("cloud", mo.cloud)->required()->check(CLI::ExistingFile);
    mst->add_option("--alpha", mo.alphas, "Exponents for edge power sums")->delimiter(',')->capture_default_str();
    mst->add_option("--algorithm", mo.algorithm)
        ->check(CLI::IsMember({"auto", "prim", "boruvka"}))
        ->capture_default_str();
    mst->add_option("--out", mo.out, "Edge CSV")->required();
    mst->add_option("--summary", mo.summary, "Summary JSON (default: --out with .json)");
    mst->add_flag("--dedup", mo.dedup, "Drop duplicate points first");

    app.config_formatter(std::make_shared<FlatConfig>(std::vector<std::string>{
        "sample", "schweinhart", "brito-calibrate", "brito", "embed", "ngrams", "mst-stats"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        set_thread_count(threads);
        CLI::App* sub = app.get_subcommands().front();
        RunManifest manifest(sub->get_name(), args);
        manifest.set_threads(threads);
        std::string config_path;
        if (config_opt->count() > 0) config_path = config_opt->as<std::string>();
        manifest.set_config(sub->config_to_str(true, false), config_path);
        if (sub == sample) {
            so.n_given = n_opt->count() > 0;
            return cmd_sample(so, manifest, out);
        }
        if (sub == schw) return cmd_schweinhart(sw, manifest, out, err);
        if (sub == cal) return cmd_calibrate(co, manifest, out);
        if (sub == brito) return cmd_brito(bo, manifest, out);
        if (sub == embed) return cmd_embed(eo, manifest, out, err);
        if (sub == ngrams) return cmd_ngrams(no, manifest, out, err);
        return cmd_mst(mo, manifest, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DegenerateFit& e) {
        err << "error: " << e.what() << " (" << e.diagnostics() << ")\n";
        return kExitCompute;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << " (residual " << e.residual() << " after " << e.steps() << " steps)\n";
        return kExitCompute;
    } catch (const OutOfRange& e) {
        err << "error: " << e.what() << '\n';
        return kExitCompute;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace dimscope
