#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <Eigen/SVD>

#include "dimscope/error.hpp"
#include "dimscope/lsa.hpp"
#include "dimscope/rng.hpp"
#include "dimscope/svd.hpp"

using namespace dimscope;
namespace fs = std::filesystem;

namespace {

Corpus corpus_of(std::vector<std::vector<std::string>> docs) {
    Corpus c;
    for (std::size_t i = 0; i < docs.size(); ++i) c.ids.push_back("d" + std::to_string(i));
    c.documents = std::move(docs);
    return c;
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

// Largest entrywise gap between truncated and dense factors, compared in
// absolute value so the check is independent of sign conventions.
double abs_u_gap(const TruncatedSvd& svd, const Eigen::MatrixXd& dense_u) {
    return (svd.U.cwiseAbs() - dense_u.leftCols(svd.U.cols()).cwiseAbs()).cwiseAbs().maxCoeff();
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("dimscope_test_" + name); }

}  // namespace

TEST_CASE("count matrix") {
    const Corpus c = corpus_of({{"a", "b", "a"}, {"b"}});
    const CountMatrix m = count_matrix(c);
    CHECK(m.vocabulary == std::vector<std::string>{"a", "b"});
    CHECK(m.counts.coeff(0, 0) == 2);
    CHECK(m.counts.coeff(0, 1) == 0);
    CHECK(m.counts.coeff(1, 0) == 1);
    CHECK(m.counts.coeff(1, 1) == 1);
    CHECK(m.row_totals == std::vector<std::int64_t>{2, 2});
    CHECK(m.col_totals == std::vector<std::int64_t>{3, 1});

    const CountMatrix filtered = count_matrix(c, {"a"});
    CHECK(filtered.vocabulary == std::vector<std::string>{"b"});
    CHECK(filtered.counts.coeff(0, 0) == 1);
    CHECK(filtered.counts.coeff(0, 1) == 1);

    const CountMatrix dropped = count_matrix(corpus_of({{"x", "y"}, {"a"}, {"y", "z"}}), {"a"});
    CHECK(dropped.docs() == 2);
    CHECK(dropped.dropped_documents == 1);
    CHECK(dropped.document_ids == std::vector<std::string>{"d0", "d2"});

    CHECK_THROWS_AS(count_matrix(corpus_of({{"a"}})), InvalidArgument);
    CHECK_THROWS_AS(count_matrix(corpus_of({{"a"}, {"a"}}), {"a"}), InvalidArgument);
    CHECK_THROWS_AS(count_matrix(Corpus{}), InvalidArgument);
}

TEST_CASE("column totals equal filtered document lengths") {
    Rng rng(Seed{1});
    std::vector<std::vector<std::string>> docs(30);
    for (auto& d : docs) {
        const auto len = 1 + rng.below(40);
        for (std::uint64_t k = 0; k < len; ++k) d.push_back("w" + std::to_string(rng.below(25)));
    }
    const TokenSet stop{"w0", "w1"};
    const CountMatrix m = count_matrix(corpus_of(docs), stop);
    Eigen::SparseMatrix<std::int64_t> counts = m.counts;
    for (Eigen::Index j = 0; j < counts.cols(); ++j) {
        std::int64_t sum = 0;
        for (Eigen::SparseMatrix<std::int64_t>::InnerIterator it(counts, j); it; ++it) sum += it.value();
        CHECK(sum == m.col_totals[static_cast<std::size_t>(j)]);
    }
    for (std::size_t i = 0; i < m.words(); ++i) CHECK(m.row_totals[i] > 0);
}

TEST_CASE("entropy weights") {
    const CountMatrix m = count_matrix(corpus_of({{"a", "a", "a", "b", "c", "d"}, {"a", "c", "d", "e"}}));
    const Eigen::VectorXd eps = entropy_weights(m);
    const double expect = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)) / std::log(2.0);
    CHECK(std::abs(eps(0) - expect) <= 1e-12);
    CHECK(std::abs(eps(0) - 0.8113) < 1e-4);
    CHECK(eps(1) == 0.0);  // b: one document
    CHECK(eps(2) == 1.0);  // c: even over both
    CHECK(eps(4) == 0.0);
    for (Eigen::Index i = 0; i < eps.size(); ++i) {
        CHECK(eps(i) >= 0.0);
        CHECK(eps(i) <= 1.0);
    }
    // Even spread over many documents is exactly 1.
    std::vector<std::vector<std::string>> docs(7, {"u", "u", "v"});
    docs[3].push_back("w");
    const Eigen::VectorXd e7 = entropy_weights(count_matrix(corpus_of(docs)));
    CHECK(e7(0) == 1.0);
    CHECK(e7(1) == 1.0);
    CHECK(e7(2) == 0.0);
}

TEST_CASE("weight matrix") {
    const CountMatrix m = count_matrix(corpus_of({{"a", "b", "a"}, {"b"}}));
    const Eigen::VectorXd eps = entropy_weights(m);
    CHECK(eps(0) == 0.0);
    CHECK(eps(1) == 1.0);
    const Eigen::SparseMatrix<double> w = weight_matrix(m, eps);
    CHECK(w.coeff(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(w.coeff(0, 1) == 0.0);
    CHECK(w.coeff(1, 0) == 0.0);
    CHECK(w.coeff(1, 1) == 0.0);
    CHECK(w.nonZeros() == 1);

    // A word confined to one document outweighs one spread evenly.
    const CountMatrix three = count_matrix(corpus_of({{"only", "even", "x"}, {"even", "y"}, {"even", "z"}}));
    const Eigen::SparseMatrix<double> w3 = weight_matrix(three, entropy_weights(three));
    CHECK(w3.coeff(0, 0) > w3.coeff(1, 0));
    for (Eigen::Index j = 0; j < w3.outerSize(); ++j) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(w3, j); it; ++it) {
            CHECK(it.value() >= 0.0);
            CHECK(it.value() <= 1.0);
        }
    }
    CHECK_THROWS_AS(weight_matrix(m, Eigen::VectorXd::Zero(5)), InvalidArgument);
}

TEST_CASE("truncated svd: small exact cases") {
    Eigen::SparseMatrix<double> diag(3, 3);
    diag.insert(0, 0) = 3;
    diag.insert(1, 1) = -2;
    diag.insert(2, 2) = 1;
    const TruncatedSvd s = truncated_svd(diag, 2);
    CHECK(s.singular_values(0) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(s.singular_values(1) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(std::abs(s.U(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(s.U(1, 1) - 1.0) < 1e-12);
    CHECK(std::abs(s.U(2, 0)) < 1e-12);
    // Sign follows the left vector, so the right vector picks up the -2.
    CHECK(std::abs(s.V(1, 1) + 1.0) < 1e-12);

    Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(6, 1, 6).normalized();
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(4, -1, 2).normalized();
    const Eigen::MatrixXd dense = 5.0 * u * v.transpose();
    const TruncatedSvd r = truncated_svd(dense.sparseView(), 1);
    CHECK(r.singular_values(0) == doctest::Approx(5.0).epsilon(1e-13));

    CHECK_THROWS_AS(truncated_svd(diag, 0), InvalidArgument);
    CHECK_THROWS_AS(truncated_svd(diag, 4), InvalidArgument);
}

TEST_CASE("truncated svd matches a dense oracle") {
    Rng rng(Seed{2024});
    for (int trial = 0; trial < 12; ++trial) {
        const auto rows = static_cast<Eigen::Index>(20 + rng.below(181));
        const auto cols = static_cast<Eigen::Index>(20 + rng.below(181));
        const Eigen::SparseMatrix<double> a = random_sparse(rows, cols, 0.1, rng);
        const std::size_t d = 1 + rng.below(15);
        const TruncatedSvd s = truncated_svd(a, d);
        Eigen::JacobiSVD<Eigen::MatrixXd> dense(Eigen::MatrixXd(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(std::abs(s.singular_values(i) - dense.singularValues()(i)) <= 1e-8 * dense.singularValues()(i));
        }
        const Eigen::MatrixXd gram = s.U.transpose() * s.U;
        CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-8);
        // |U| comparison needs a gap below sigma_d; random matrices have one.
        CHECK(abs_u_gap(s, dense.matrixU()) <= 1e-8);
        for (std::size_t i = 0; i < d; ++i) {
            Eigen::Index arg = 0;
            s.U.col(i).cwiseAbs().maxCoeff(&arg);
            CHECK(s.U(arg, i) > 0.0);
        }
    }
}

TEST_CASE("50x40 sparse example and truncation commutes with the svd") {
    Rng rng(Seed{7});
    const Eigen::SparseMatrix<double> a = random_sparse(50, 40, 0.2, rng);
    const TruncatedSvd s10 = truncated_svd(a, 10);
    Eigen::JacobiSVD<Eigen::MatrixXd> dense(Eigen::MatrixXd(a), Eigen::ComputeThinU);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(s10.singular_values(i) - dense.singularValues()(i)) <= 1e-8);
    CHECK(abs_u_gap(s10, dense.matrixU()) <= 1e-8);

    CountMatrix counts;
    for (Eigen::Index i = 0; i < a.rows(); ++i) counts.vocabulary.push_back("w" + std::to_string(i));
    const EmbeddingTable t15 = embed_words(counts, a, 15);
    const EmbeddingTable t5 = embed_words(counts, a, 5);
    const EmbeddingTable cut = truncate_embeddings(t15, 5);
    CHECK((cut.vectors - t5.vectors).cwiseAbs().maxCoeff() <= 1e-8);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(cut.singular_values[i] - t5.singular_values[i]) <= 1e-8);
    CHECK(truncate_embeddings(t15, 15).vectors == t15.vectors);
    CHECK(truncate_embeddings(t15, 1).vectors.col(0) == t15.vectors.col(0));
    CHECK_THROWS_AS(truncate_embeddings(t15, 0), InvalidArgument);
    CHECK_THROWS_AS(truncate_embeddings(t15, 16), InvalidArgument);
}

TEST_CASE("reconstruction error shrinks with d") {
    Rng rng(Seed{8});
    const Eigen::SparseMatrix<double> a = random_sparse(60, 30, 0.3, rng);
    const Eigen::MatrixXd dense(a);
    double previous = dense.norm();
    for (std::size_t d = 1; d <= 30; d += 4) {
        const TruncatedSvd s = truncated_svd(a, d);
        const double err = (dense - s.U * s.singular_values.asDiagonal() * s.V.transpose()).norm();
        CHECK(err <= previous + 1e-12);
        previous = err;
        for (Eigen::Index i = 1; i < s.singular_values.size(); ++i) {
            CHECK(s.singular_values(i) <= s.singular_values(i - 1));
        }
    }
}

TEST_CASE("rank-deficient input still yields an orthonormal basis") {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(30, 20);
    dense.block(0, 0, 3, 3) = Eigen::Matrix3d::Identity() * 2.0;
    const TruncatedSvd s = truncated_svd(dense.sparseView(), 6);
    CHECK(s.singular_values(0) == doctest::Approx(2.0));
    CHECK(s.singular_values(3) <= 1e-12);
    const Eigen::MatrixXd gram = s.U.transpose() * s.U;
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("n-gram embeddings") {
    EmbeddingTable t;
    t.tokens = {"a", "b", "c"};
    t.vectors.resize(3, 2);
    t.vectors << 1, 2, 3, 4, 5, 6;

    const NgramEmbeddings bi = ngram_embeddings(corpus_of({{"a", "b", "a", "b"}}), t, 2);
    REQUIRE(bi.table.size() == 2);
    CHECK(bi.table.tokens == std::vector<std::string>{"a b", "b a"});
    CHECK(bi.table.dim() == 4);
    CHECK(bi.table.vectors.row(0) == Eigen::RowVector4d(1, 2, 3, 4));
    CHECK(bi.table.vectors.row(1) == Eigen::RowVector4d(3, 4, 1, 2));
    CHECK(bi.oov_skipped == 0);

    const NgramEmbeddings uni = ngram_embeddings(corpus_of({{"c", "a"}, {"a"}}), t, 1);
    CHECK(uni.table.tokens == std::vector<std::string>{"c", "a"});
    CHECK(uni.table.vectors.row(0) == t.vectors.row(2));

    // No windows across documents; unknown tokens are counted.
    const NgramEmbeddings split = ngram_embeddings(corpus_of({{"a"}, {"b", "zz", "c"}}), t, 2);
    CHECK(split.table.size() == 0);
    CHECK(split.oov_skipped == 2);

    const NgramEmbeddings tri = ngram_embeddings(corpus_of({{"a", "b", "c", "a"}}), t, 3);
    CHECK(tri.table.dim() == 6);
    CHECK(tri.table.size() == 2);
    CHECK_THROWS_AS(ngram_embeddings(corpus_of({{"a"}}), t, 0), InvalidArgument);
}

TEST_CASE("unique bigrams outnumber unique words") {
    Rng rng(Seed{3});
    std::vector<std::vector<std::string>> docs(20);
    for (auto& d : docs) {
        for (int k = 0; k < 30; ++k) d.push_back("w" + std::to_string(rng.below(40)));
    }
    const Corpus c = corpus_of(docs);
    const CountMatrix m = count_matrix(c);
    const EmbeddingTable t = embed_words(m, weight_matrix(m, entropy_weights(m)), 5);
    const auto uni = ngram_embeddings(c, t, 1);
    const auto bi = ngram_embeddings(c, t, 2);
    CHECK(uni.table.size() == m.words());
    CHECK(bi.table.size() >= uni.table.size());
    CHECK(bi.table.dim() == 2 * t.dim());
    CHECK(to_point_cloud(bi.table).n() == bi.table.size());
}

TEST_CASE("embedding tsv round trip") {
    EmbeddingTable t;
    t.tokens = {"alpha", "beta"};
    t.vectors.resize(2, 3);
    t.vectors << 0.1, -1.0 / 3.0, 1e-20, 2.5, 0.0, -7.0;
    t.singular_values = {3.0, 2.0, 1.0 / 7.0};
    const fs::path p = temp_path("emb.tsv");
    write_embeddings(p, t);
    const EmbeddingTable back = read_embeddings(p);
    CHECK(back.tokens == t.tokens);
    CHECK(back.vectors == t.vectors);
    CHECK(back.singular_values == t.singular_values);
    const fs::path p2 = temp_path("emb2.tsv");
    write_embeddings(p2, back);
    std::ifstream a(p), b(p2);
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
    CHECK(sa.rfind("#dim=3 #sigma=3,2,", 0) == 0);
    fs::remove(p);
    fs::remove(p2);
}

TEST_CASE("external vectors without a header load") {
    const fs::path p = temp_path("w2v.txt");
    {
        std::ofstream out(p);
        out << "2 3\nfoo 1 2 3\nbar 4 5 6\n";
    }
    const EmbeddingTable t = read_embeddings(p);
    CHECK(t.tokens == std::vector<std::string>{"foo", "bar"});
    CHECK(t.dim() == 3);
    CHECK(t.vectors(1, 2) == 6.0);
    CHECK(t.singular_values.empty());
    {
        std::ofstream out(p);
        out << "foo\t1\t2\nbar\t3\n";
    }
    CHECK_THROWS_AS(read_embeddings(p), FormatError);
    fs::remove(p);
}

TEST_CASE("corpus loaders") {
    const fs::path dir = temp_path("corpus");
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream(dir / "b.txt") << "gamma delta\n gamma";
        std::ofstream(dir / "a.txt") << "alpha  beta\tgamma\n";
    }
    const Corpus c = load_corpus(dir);
    CHECK(c.ids == std::vector<std::string>{"a.txt", "b.txt"});
    CHECK(c.documents[0] == std::vector<std::string>{"alpha", "beta", "gamma"});
    CHECK(c.documents[1] == std::vector<std::string>{"gamma", "delta", "gamma"});

    const fs::path jsonl = temp_path("corpus.jsonl");
    {
        std::ofstream(jsonl) << "{\"id\": \"x\", \"tokens\": [\"a\", \"b\"]}\n\n{\"id\": 7, \"tokens\": []}\n";
    }
    const Corpus j = load_corpus(jsonl);
    CHECK(j.ids == std::vector<std::string>{"x", "7"});
    CHECK(j.documents[0] == std::vector<std::string>{"a", "b"});
    CHECK(j.documents[1].empty());
    {
        std::ofstream(jsonl) << "{\"id\": \"x\"}\n";
    }
    CHECK_THROWS_AS(load_corpus(jsonl), FormatError);

    const fs::path stop = temp_path("stop.txt");
    {
        std::ofstream(stop) << "the\n\n a \n";
    }
    const TokenSet s = load_stopwords(stop);
    CHECK(s == TokenSet{"the", "a"});
    const Corpus f = filter_stopwords(corpus_of({{"the", "cat"}, {"a"}}), s);
    CHECK(f.documents[0] == std::vector<std::string>{"cat"});
    CHECK(f.documents[1].empty());
    fs::remove_all(dir);
    fs::remove(jsonl);
    fs::remove(stop);
}
