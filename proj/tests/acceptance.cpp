// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass). Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "dimscope/brito.hpp"
#include "dimscope/cli.hpp"
#include "dimscope/geometry.hpp"
#include "dimscope/lsa.hpp"
#include "dimscope/mst.hpp"
#include "dimscope/schweinhart.hpp"
#include "dimscope/svd.hpp"
#include "oracles.hpp"

using namespace dimscope;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = DIMSCOPE_TEST_DATA;
const fs::path kTmp = DIMSCOPE_TEST_TMP;

// Tolerances.
constexpr double kMstTol = 1e-12;
constexpr double kRecoveryTol = 1e-9;
constexpr double kEntropyTol = 1e-12;
constexpr double kSvdTol = 1e-8;
constexpr double kCubeApe = 0.06;
constexpr double kSphereApe = 0.05;
constexpr double kCarpetApe = 0.05;
constexpr double kSpongeApe = 0.06;
constexpr double kSwissApe = 0.05;
constexpr double kGaussLo = 1.9, kGaussHi = 2.15;
constexpr double kBackgroundLo = 1.9, kBackgroundHi = 2.2;
constexpr double kCascadeRange = 0.2;
constexpr int kSphere27Lo = 6, kSphere27Hi = 10;

// Schweinhart protocol for the synthetic tables.
constexpr std::size_t kTableN = 30000;
constexpr std::size_t kNMin = 2000;
constexpr std::size_t kSizeCount = 8;
constexpr int kReplicates = 3;
constexpr double kGamma = 0.1;

// Brito protocol.
constexpr std::size_t kNCal = 2000;
constexpr std::size_t kL = 100;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

PointCloud random_cloud(std::size_t n, std::size_t d, Rng& rng) {
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
    return PointCloud(m);
}

bool handshake_holds(const MinimumSpanningTree& t, std::size_t n) {
    const auto deg = t.degrees();
    return std::accumulate(deg.begin(), deg.end(), std::size_t{0}) == 2 * (n - 1);
}

SchweinhartReport table_sweep(const PointCloud& cloud, const AlphaGrid& grid, Seed seed) {
    const SizeSchedule schedule = schedule_sizes(cloud.n(), kNMin, kSizeCount, kReplicates);
    return sweep_alpha(cloud, grid, schedule, kGamma, seed);
}

// Mean absolute percentage error of d_hat over every record; NaN estimates
// count as infinite error.
double mean_ape(const SchweinhartReport& r, double truth) {
    double sum = 0.0;
    for (const auto& rec : r.records) {
        sum += std::isfinite(rec.d_hat) ? std::abs(rec.d_hat - truth) / truth : std::numeric_limits<double>::infinity();
    }
    return sum / static_cast<double>(r.records.size());
}

Eigen::SparseMatrix<double> random_sparse(Eigen::Index rows, Eigen::Index cols, double density, Rng& rng) {
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (rng.uniform() < density) t.emplace_back(i, j, rng.uniform(-1.0, 1.0));
        }
    }
    Eigen::SparseMatrix<double> m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (code != kExitOk) {
        std::cerr << "  dimscope";
        for (const auto& a : args) std::cerr << ' ' << a;
        std::cerr << " -> " << code << "\n  " << err.str();
    }
    return code;
}

// Shared by criteria 5 and 9.
const BritoCalibration& full_calibration() {
    static const BritoCalibration calib = calibrate(2, 15, kNCal, kL, Seed{2024});
    return calib;
}

fs::path calibration_file() {
    const fs::path p = kTmp / "calibration.json";
    if (!fs::exists(p)) save_calibration(p, full_calibration());
    return p;
}

Outcome mst_oracle() {
    Rng rng(Seed{1});
    double worst = 0.0;
    bool trees_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng.below(6);
        const std::size_t d = 1 + rng.below(5);
        const PointCloud c = random_cloud(n, d, rng);
        const double truth = oracle::brute_force_mst_weight(c);
        for (auto algo : {MstAlgorithm::prim, MstAlgorithm::boruvka_kdtree}) {
            const auto t = build_emst(c, algo);
            worst = std::max(worst, std::abs(t.total_weight() - truth));
            trees_ok = trees_ok && t.edges().size() == n - 1;
        }
    }
    return {worst <= kMstTol && trees_ok, "200 clouds, max |w - w_oracle| = " + fmt(worst)};
}

Outcome handshake() {
    Rng rng(Seed{2});
    std::size_t trees = 0;
    bool ok = true;
    std::vector<PointCloud> clouds;
    for (int i = 0; i < 50; ++i) clouds.push_back(random_cloud(2 + rng.below(300), 1 + rng.below(6), rng));
    clouds.push_back(sample_manifold({ManifoldKind::swiss_roll, 2}, 5000, Seed{3}));
    clouds.push_back(sample_ifs_fractal({FractalKind::menger_sponge, 100}, 5000, Seed{4}));
    clouds.push_back(sample_lognormal_cascade({12}, Seed{5}));
    for (const auto& c : clouds) {
        for (auto algo : {MstAlgorithm::prim, MstAlgorithm::boruvka_kdtree}) {
            const auto t = build_emst(c, algo);
            const auto deg = t.degrees();
            const double mean = static_cast<double>(std::accumulate(deg.begin(), deg.end(), std::size_t{0})) /
                                static_cast<double>(c.n());
            ok = ok && handshake_holds(t, c.n()) &&
                 mean == 2.0 * static_cast<double>(c.n() - 1) / static_cast<double>(c.n());
            ++trees;
        }
    }
    return {ok, std::to_string(trees) + " trees, sum deg = 2(n-1) on all"};
}

Outcome exact_recovery() {
    double worst = 0.0;
    const double alpha = 1.0;
    for (double d : {1.0, 2.0, 4.0, 8.0}) {
        std::vector<double> log_m, log_e;
        for (double m = 1000; m <= 128000; m *= 2) {
            log_m.push_back(std::log(m));
            log_e.push_back(std::log(2.5) + (d - alpha) / d * std::log(m));
        }
        const FitRecord r = fit_log_log(alpha, log_m, log_e, kGamma);
        worst = std::max(worst, std::abs(r.d_hat - d));
    }
    return {worst <= kRecoveryTol, "d* in {1,2,4,8}, max |d_hat - d*| = " + fmt(worst)};
}

Outcome table_a1() {
    const AlphaGrid grid{1.0, 10.0, 1.0};
    struct Row {
        std::string name;
        PointCloud cloud;
        double truth;
        double limit;
    };
    const double carpet = hausdorff_dimension(FractalKind::sierpinski_carpet);
    const double sponge = hausdorff_dimension(FractalKind::menger_sponge);
    std::vector<Row> rows;
    rows.push_back({"cube", sample_manifold({ManifoldKind::unit_cube, 3}, kTableN, Seed{11}), 3.0, kCubeApe});
    rows.push_back({"sphere5/18",
                    lift_dimension(sample_manifold({ManifoldKind::unit_sphere, 5}, kTableN, Seed{12}), 18), 5.0,
                    kSphereApe});
    rows.push_back({"carpet", sample_ifs_fractal({FractalKind::sierpinski_carpet, 100}, kTableN, Seed{13}), carpet,
                    kCarpetApe});
    rows.push_back({"sponge", sample_ifs_fractal({FractalKind::menger_sponge, 100}, kTableN, Seed{14}), sponge,
                    kSpongeApe});
    rows.push_back({"swiss-roll", sample_manifold({ManifoldKind::swiss_roll, 2}, kTableN, Seed{15}), 2.0,
                    kSwissApe});
    bool ok = true;
    std::string detail = "n=" + std::to_string(kTableN) + " mean APE over alpha=1..10:";
    for (const auto& row : rows) {
        const double ape = mean_ape(table_sweep(row.cloud, grid, Seed{100}), row.truth);
        ok = ok && ape <= row.limit;
        detail += " " + row.name + " " + fmt(100 * ape, 3) + "% (<= " + fmt(100 * row.limit, 2) + "%)";
    }
    return {ok, detail};
}

Outcome table_a2() {
    const BritoCalibration& calib = full_calibration();
    const std::vector<std::size_t> sizes{333, 417, 500, 583, 667, 750, 833, 917, 1000};
    bool ok = true;
    std::string detail = "calibration 2..15 n_cal=2000 L=100;";

    const auto curve_exact = [&](const std::string& name, const PointCloud& cloud) {
        const auto curve = convergence_curve(cloud, sizes, calib, Seed{31});
        int worst = 2;
        for (const auto& p : curve) {
            if (p.d_bqy != 2) worst = p.d_bqy;
        }
        ok = ok && worst == 2;
        detail += " " + name + " sizes 333..1000 " + (worst == 2 ? "all 2" : "saw " + std::to_string(worst)) + ";";
    };
    curve_exact("mobius", sample_manifold({ManifoldKind::mobius_strip, 2}, 1000, Seed{21}));
    curve_exact("swiss-roll", sample_manifold({ManifoldKind::swiss_roll, 2}, 1000, Seed{22}));

    const int s9 = estimate(lift_dimension(sample_manifold({ManifoldKind::unit_sphere, 2}, 1000, Seed{23}), 9), calib)
                       .d_bqy;
    ok = ok && s9 == 2;
    detail += " sphere2/9 d_bqy=" + std::to_string(s9) + ";";

    const int s27 =
        estimate(lift_dimension(sample_manifold({ManifoldKind::unit_sphere, 8}, 1000, Seed{24}), 27), calib).d_bqy;
    ok = ok && s27 >= kSphere27Lo && s27 <= kSphere27Hi;
    detail += " sphere8/27 d_bqy=" + std::to_string(s27) + " (in [6,10])";
    return {ok, detail};
}

Outcome noise_robustness() {
    const AlphaGrid grid{};
    const PointCloud roll = sample_manifold({ManifoldKind::swiss_roll, 2}, kTableN, Seed{41});
    const SchweinhartReport gauss = table_sweep(add_gaussian_noise(roll, 0.01, Seed{42}), grid, Seed{43});
    const PointCloud background_cloud = add_uniform_background(roll, 0.2, Seed{44});
    const SchweinhartReport background = table_sweep(background_cloud, grid, Seed{45});
    const bool g_ok = gauss.d_min && *gauss.d_min >= kGaussLo && *gauss.d_max <= kGaussHi;
    const bool b_ok = background.d_min && *background.d_min >= kBackgroundLo && *background.d_min <= kBackgroundHi;
    std::string detail = "swiss roll n=" + std::to_string(kTableN) + ", gauss 0.01: ";
    detail += gauss.d_min ? "[" + fmt(*gauss.d_min) + ", " + fmt(*gauss.d_max) + "]" : "none admissible";
    detail += " (within [1.9, 2.15]); background 0.2: ";
    detail += background.d_min ? "min " + fmt(*background.d_min) : "none admissible";
    detail += " (in [1.9, 2.2])";
    return {g_ok && b_ok, detail};
}

Outcome multifractal() {
    const PointCloud cascade = sample_lognormal_cascade({16}, Seed{51});
    const SchweinhartReport r = table_sweep(cascade, AlphaGrid{}, Seed{52});
    std::vector<const FitRecord*> admissible;
    for (const auto& rec : r.records) {
        if (rec.admissible) admissible.push_back(&rec);
    }
    if (admissible.size() < 4) return {false, "only " + std::to_string(admissible.size()) + " admissible alpha"};
    const double range = *r.d_max - *r.d_min;
    // Relative interval width, first versus last quarter of the admissible alphas.
    const std::size_t q = std::max<std::size_t>(1, admissible.size() / 4);
    const auto width = [](const FitRecord* f) { return (f->ci_high - f->ci_low) / f->d_hat; };
    double low = 0.0, high = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        low += width(admissible[i]);
        high += width(admissible[admissible.size() - 1 - i]);
    }
    low /= static_cast<double>(q);
    high /= static_cast<double>(q);
    const bool ok = range >= kCascadeRange && high > low;
    return {ok, "cascade J=16, d_hat in [" + fmt(*r.d_min) + ", " + fmt(*r.d_max) + "] range " + fmt(range) +
                    ", rel CI width " + fmt(low) + " -> " + fmt(high) + " across " +
                    std::to_string(admissible.size()) + " admissible alpha"};
}

Outcome lsa_oracles() {
    // Entropy of a word seen 3 and 1 times in two documents.
    Corpus c;
    c.ids = {"a", "b"};
    c.documents = {{"w", "w", "w", "x"}, {"w", "y"}};
    const double eps = entropy_weights(count_matrix(c))(0);
    const double hand = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)) / std::log(2.0);
    const double eps_err = std::abs(eps - hand);

    Rng rng(Seed{61});
    double sigma_err = 0.0, u_err = 0.0, trunc_err = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto rows = static_cast<Eigen::Index>(10 + rng.below(191));
        const auto cols = static_cast<Eigen::Index>(10 + rng.below(191));
        const Eigen::SparseMatrix<double> a = random_sparse(rows, cols, 0.05 + 0.2 * rng.uniform(), rng);
        const std::size_t d = 1 + rng.below(std::min<std::uint64_t>(15, static_cast<std::uint64_t>(std::min(rows, cols))));
        const TruncatedSvd s = truncated_svd(a, d);
        const Eigen::BDCSVD<Eigen::MatrixXd> dense(Eigen::MatrixXd(a), Eigen::ComputeThinU);
        for (std::size_t i = 0; i < d; ++i) {
            sigma_err = std::max(sigma_err, std::abs(s.singular_values(i) - dense.singularValues()(i)) /
                                                dense.singularValues()(0));
        }
        const Eigen::MatrixXd du = dense.matrixU().leftCols(d);
        u_err = std::max(u_err, (s.U.cwiseAbs() - du.cwiseAbs()).cwiseAbs().maxCoeff());
        if (d > 1) {
            const TruncatedSvd small = truncated_svd(a, d / 2);
            trunc_err = std::max(trunc_err, (s.U.leftCols(d / 2) - small.U).cwiseAbs().maxCoeff());
        }
    }
    const bool ok = eps_err <= kEntropyTol && sigma_err <= kSvdTol && u_err <= kSvdTol && trunc_err <= kSvdTol;
    return {ok, "entropy err " + fmt(eps_err) + "; 50 sparse matrices: sigma err " + fmt(sigma_err) + ", |U| err " +
                    fmt(u_err) + ", truncation err " + fmt(trunc_err)};
}

// Runs the full mini-corpus pipeline into dir; returns the produced files.
std::vector<fs::path> corpus_pipeline(const fs::path& dir, const std::string& threads, std::string& problem) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string corpus = (kData / "mini_corpus").string();
    const std::string stop = (kData / "stopwords.txt").string();
    const std::string calib = calibration_file().string();
    std::vector<fs::path> files;
    const auto step = [&](std::vector<std::string> args) {
        args.insert(args.begin(), {"--threads", threads});
        if (problem.empty() && cli(args) != kExitOk) problem = "command failed: " + args[2];
    };
    step({"embed", corpus, "--stopwords", stop, "--d", "15", "--truncate", "5,10", "--out", (dir / "emb.tsv").string()});
    for (const std::string d : {"5", "10", "15"}) {
        const fs::path table = d == "15" ? dir / "emb.tsv" : dir / ("emb.d" + d + ".tsv");
        files.push_back(table);
        for (const std::string n : {"1", "2", "3"}) {
            const std::string stem = "d" + d + "_n" + n;
            const fs::path cloud = dir / (stem + ".csv");
            step({"ngrams", table.string(), "--corpus", corpus, "--stopwords", stop, "--n", n, "--out",
                  cloud.string()});
            files.push_back(cloud);
            if (n == "3") continue;
            step({"schweinhart", cloud.string(), "--out", (dir / (stem + ".schweinhart.json")).string()});
            step({"brito", cloud.string(), "--calib", calib, "--out", (dir / (stem + ".brito.json")).string()});
            step({"mst-stats", cloud.string(), "--out", (dir / (stem + ".edges.csv")).string()});
            for (const char* suffix : {".schweinhart.json", ".schweinhart.csv", ".brito.json", ".brito.csv",
                                       ".edges.csv", ".edges.json"}) {
                files.push_back(dir / (stem + suffix));
            }
        }
    }
    return files;
}

Outcome mini_corpus() {
    std::string problem;
    const auto files = corpus_pipeline(kTmp / "corpus", "1", problem);
    if (!problem.empty()) return {false, problem};
    std::size_t reports = 0;
    for (const auto& f : files) {
        if (!fs::exists(f) || fs::file_size(f) == 0) return {false, "missing or empty " + f.filename().string()};
        if (f.string().ends_with(".schweinhart.json")) {
            const json doc = json::parse(slurp(f));
            bool finite = false;
            for (const auto& rec : doc["records"]) finite = finite || rec["d_hat"].is_number();
            if (doc["records"].empty() || !finite) return {false, "no finite estimate in " + f.filename().string()};
            ++reports;
        }
        if (f.string().ends_with(".brito.json")) {
            const json doc = json::parse(slurp(f));
            if (!doc["expected_dim"].is_number()) return {false, "no estimate in " + f.filename().string()};
            ++reports;
        }
    }
    // Reports record input paths, so the rerun goes to the same directory.
    std::vector<std::string> first;
    for (const auto& f : files) first.push_back(slurp(f));
    std::string rerun_problem;
    const auto again = corpus_pipeline(kTmp / "corpus", "1", rerun_problem);
    if (!rerun_problem.empty()) return {false, "rerun: " + rerun_problem};
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (first[i] != slurp(again[i])) return {false, "rerun differs: " + files[i].filename().string()};
    }
    return {true, "d in {5,10,15} x n in {1,2,3}: " + std::to_string(files.size()) + " outputs, " +
                      std::to_string(reports) + " finite reports, rerun byte-identical"};
}

Outcome determinism() {
    const auto run_all = [&](const fs::path& dir, const std::string& threads) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        const auto p = [&](const char* name) { return (dir / name).string(); };
        const std::vector<std::vector<std::string>> steps = {
            {"sample", "--object", "swiss-roll", "--n", "6000", "--noise-gauss", "0.01", "--noise-uniform-frac",
             "0.1", "--seed", "5", "--out", p("roll.csv")},
            {"sample", "--object", "menger-sponge", "--n", "3000", "--seed", "6", "--out", p("sponge.bin")},
            {"sample", "--object", "lognormal-cascade", "--n", "4096", "--seed", "7", "--out", p("cascade.csv")},
            {"schweinhart", p("roll.csv"), "--alpha-stop", "3", "--out", p("roll.schweinhart.json")},
            {"mst-stats", p("sponge.bin"), "--alpha", "0.5,1,2", "--out", p("sponge.edges.csv")},
            {"brito-calibrate", "--dims", "2..4", "--n-cal", "500", "--L", "10", "--seed", "8", "--out",
             p("calib.json")},
            {"brito", p("roll.csv"), "--calib", p("calib.json"), "--sizes", "1000,3000", "--out",
             p("roll.brito.json")},
            {"embed", (kData / "mini_corpus").string(), "--d", "8", "--truncate", "4", "--out", p("emb.tsv")},
            {"ngrams", p("emb.tsv"), "--corpus", (kData / "mini_corpus").string(), "--n", "2", "--out",
             p("bigrams.bin")},
        };
        for (auto args : steps) {
            args.insert(args.begin(), {"--threads", threads});
            if (cli(args) != kExitOk) return false;
        }
        return true;
    };
    // Same directory both times: reports record input paths.
    const fs::path dir = kTmp / "determinism";
    if (!run_all(dir, "1")) return {false, "a command failed with --threads 1"};
    std::vector<std::pair<fs::path, std::string>> first;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().string().ends_with(".manifest.json")) continue;
        first.emplace_back(entry.path(), slurp(entry.path()));
    }
    std::sort(first.begin(), first.end());
    if (!run_all(dir, "4")) return {false, "a command failed with --threads 4"};
    std::size_t compared = 0;
    for (const auto& [path, bytes] : first) {
        if (slurp(path) != bytes) return {false, path.filename().string() + " differs between --threads 1 and 4"};
        ++compared;
    }
    return {true, "9 commands, " + std::to_string(compared) + " outputs byte-identical across --threads 1/4"};
}

}  // namespace

int main(int argc, char** argv) {
    fs::create_directories(kTmp);
    // Optional arguments select criteria by number.
    std::vector<std::size_t> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::stoul(argv[i]));
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"mst-oracle", mst_oracle},
        {"handshake", handshake},
        {"exact-recovery", exact_recovery},
        {"table-a1", table_a1},
        {"table-a2", table_a2},
        {"noise-robustness", noise_robustness},
        {"multifractal", multifractal},
        {"lsa-oracles", lsa_oracles},
        {"mini-corpus", mini_corpus},
        {"determinism", determinism},
    };
    int failed = 0;
    std::size_t ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && std::find(only.begin(), only.end(), i + 1) == only.end()) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += o.pass ? 0 : 1;
        std::printf("%s %2zu %-17s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(ran) - failed, ran);
    return failed;
}
