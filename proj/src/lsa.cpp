#include "dimscope/lsa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dimscope/error.hpp"
#include "dimscope/svd.hpp"

namespace dimscope {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_whitespace(std::istream& in) {
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token) tokens.push_back(std::move(token));
    return tokens;
}

}  // namespace

Corpus load_corpus_directory(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InvalidArgument("corpus directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    Corpus corpus;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw FormatError("cannot read " + file.string());
        corpus.ids.push_back(file.filename().string());
        corpus.documents.push_back(split_whitespace(in));
    }
    return corpus;
}

Corpus load_corpus_jsonl(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw InvalidArgument("cannot open corpus file: " + file.string());
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!record.is_object() || !record.contains("tokens") || !record["tokens"].is_array()) {
            throw FormatError(file.string() + ":" + std::to_string(line_no) + ": expected {\"id\", \"tokens\"}");
        }
        std::string id;
        if (!record.contains("id")) {
            id = std::to_string(corpus.ids.size());
        } else if (record["id"].is_string()) {
            id = record["id"].get<std::string>();
        } else {
            id = record["id"].dump();
        }
        std::vector<std::string> tokens;
        for (const auto& t : record["tokens"]) {
            if (!t.is_string()) throw FormatError(file.string() + ":" + std::to_string(line_no) + ": non-string token");
            tokens.push_back(t.get<std::string>());
        }
        corpus.ids.push_back(std::move(id));
        corpus.documents.push_back(std::move(tokens));
    }
    return corpus;
}

Corpus load_corpus(const fs::path& path) {
    if (fs::is_directory(path)) return load_corpus_directory(path);
    if (fs::is_regular_file(path)) return load_corpus_jsonl(path);
    throw InvalidArgument("corpus not found: " + path.string());
}

TokenSet load_stopwords(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw InvalidArgument("cannot open stopword list: " + file.string());
    TokenSet words;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string token;
        if (ls >> token) words.insert(token);
    }
    return words;
}

Corpus filter_stopwords(const Corpus& corpus, const TokenSet& stopwords) {
    Corpus out;
    out.ids = corpus.ids;
    out.documents.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        std::vector<std::string> kept;
        kept.reserve(doc.size());
        for (const auto& t : doc) {
            if (!stopwords.contains(t)) kept.push_back(t);
        }
        out.documents.push_back(std::move(kept));
    }
    return out;
}

CountMatrix count_matrix(const Corpus& corpus, const TokenSet& stopwords) {
    if (corpus.ids.size() != corpus.documents.size()) throw InvalidArgument("corpus ids and documents differ in length");
    CountMatrix out;
    std::unordered_map<std::string, std::size_t> vocab;
    std::vector<Eigen::Triplet<std::int64_t>> triplets;
    for (std::size_t doc = 0; doc < corpus.documents.size(); ++doc) {
        std::unordered_map<std::size_t, std::int64_t> local;
        std::vector<std::size_t> order;
        std::int64_t length = 0;
        for (const auto& t : corpus.documents[doc]) {
            if (stopwords.contains(t)) continue;
            auto [it, inserted] = vocab.try_emplace(t, out.vocabulary.size());
            if (inserted) out.vocabulary.push_back(t);
            if (local[it->second]++ == 0) order.push_back(it->second);
            ++length;
        }
        if (length == 0) {
            ++out.dropped_documents;
            continue;
        }
        const auto col = static_cast<int>(out.col_totals.size());
        for (std::size_t w : order) triplets.emplace_back(static_cast<int>(w), col, local[w]);
        out.document_ids.push_back(corpus.ids[doc]);
        out.col_totals.push_back(length);
    }
    if (out.col_totals.size() < 2) {
        throw InvalidArgument("count_matrix: " + std::to_string(out.col_totals.size()) +
                              " non-empty documents after filtering; need at least 2");
    }
    out.counts.resize(static_cast<Eigen::Index>(out.vocabulary.size()), static_cast<Eigen::Index>(out.col_totals.size()));
    out.counts.setFromTriplets(triplets.begin(), triplets.end());
    out.row_totals.assign(out.vocabulary.size(), 0);
    for (const auto& t : triplets) out.row_totals[static_cast<std::size_t>(t.row())] += t.value();
    return out;
}

Eigen::VectorXd entropy_weights(const CountMatrix& counts) {
    const auto m = static_cast<Eigen::Index>(counts.words());
    const double log_n = std::log(static_cast<double>(counts.docs()));
    Eigen::VectorXd plogp = Eigen::VectorXd::Zero(m);
    // Rows spread evenly over every document have entropy exactly 1; detect
    // them on the integer counts so that such rows come out exactly zero.
    std::vector<std::int64_t> first(static_cast<std::size_t>(m), 0);
    std::vector<std::size_t> nnz(static_cast<std::size_t>(m), 0);
    std::vector<bool> even(static_cast<std::size_t>(m), true);
    for (Eigen::Index col = 0; col < counts.counts.outerSize(); ++col) {
        for (Eigen::SparseMatrix<std::int64_t>::InnerIterator it(counts.counts, col); it; ++it) {
            const auto row = static_cast<std::size_t>(it.row());
            const double p = static_cast<double>(it.value()) / static_cast<double>(counts.row_totals[row]);
            plogp(it.row()) += p * std::log(p);
            if (nnz[row]++ == 0) {
                first[row] = it.value();
            } else if (it.value() != first[row]) {
                even[row] = false;
            }
        }
    }
    Eigen::VectorXd eps(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto row = static_cast<std::size_t>(i);
        if (even[row] && nnz[row] == counts.docs()) {
            eps(i) = 1.0;
        } else {
            eps(i) = std::clamp(-plogp(i) / log_n, 0.0, 1.0);
        }
    }
    return eps;
}

Eigen::SparseMatrix<double> weight_matrix(const CountMatrix& counts, const Eigen::VectorXd& eps) {
    if (static_cast<std::size_t>(eps.size()) != counts.words()) throw InvalidArgument("weight_matrix: eps has wrong length");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(counts.counts.nonZeros()));
    for (Eigen::Index col = 0; col < counts.counts.outerSize(); ++col) {
        const double len = static_cast<double>(counts.col_totals[static_cast<std::size_t>(col)]);
        for (Eigen::SparseMatrix<std::int64_t>::InnerIterator it(counts.counts, col); it; ++it) {
            const double w = (1.0 - eps(it.row())) * static_cast<double>(it.value()) / len;
            if (w != 0.0) triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(col), w);
        }
    }
    Eigen::SparseMatrix<double> out(counts.counts.rows(), counts.counts.cols());
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

std::unordered_map<std::string, std::size_t> EmbeddingTable::index() const {
    std::unordered_map<std::string, std::size_t> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) out.try_emplace(tokens[i], i);
    return out;
}

EmbeddingTable embed_words(const CountMatrix& counts, const Eigen::SparseMatrix<double>& weights, std::size_t d) {
    if (static_cast<std::size_t>(weights.rows()) != counts.words()) {
        throw InvalidArgument("embed_words: weight matrix does not match the vocabulary");
    }
    const TruncatedSvd svd = truncated_svd(weights, d);
    EmbeddingTable table;
    table.tokens = counts.vocabulary;
    table.vectors = svd.U;
    table.singular_values.assign(svd.singular_values.data(), svd.singular_values.data() + svd.singular_values.size());
    return table;
}

EmbeddingTable truncate_embeddings(const EmbeddingTable& table, std::size_t d2) {
    if (d2 < 1 || d2 > table.dim()) {
        throw InvalidArgument("truncate_embeddings: d2 = " + std::to_string(d2) + " outside [1, " +
                              std::to_string(table.dim()) + "]");
    }
    EmbeddingTable out;
    out.tokens = table.tokens;
    out.vectors = table.vectors.leftCols(static_cast<Eigen::Index>(d2));
    const std::size_t keep = std::min(d2, table.singular_values.size());
    out.singular_values.assign(table.singular_values.begin(), table.singular_values.begin() + static_cast<std::ptrdiff_t>(keep));
    return out;
}

NgramEmbeddings ngram_embeddings(const Corpus& corpus, const EmbeddingTable& table, std::size_t n) {
    if (n < 1) throw InvalidArgument("ngram_embeddings: n must be at least 1");
    const auto lookup = table.index();
    const std::size_t d = table.dim();
    NgramEmbeddings out;
    std::unordered_set<std::string> seen;
    std::vector<std::vector<std::size_t>> members;
    for (const auto& doc : corpus.documents) {
        if (doc.size() < n) continue;
        for (std::size_t start = 0; start + n <= doc.size(); ++start) {
            std::vector<std::size_t> rows;
            rows.reserve(n);
            std::string key;
            for (std::size_t k = 0; k < n; ++k) {
                const auto it = lookup.find(doc[start + k]);
                if (it == lookup.end()) break;
                rows.push_back(it->second);
                if (k > 0) key += ' ';
                key += doc[start + k];
            }
            if (rows.size() < n) {
                ++out.oov_skipped;
                continue;
            }
            if (!seen.insert(key).second) continue;
            out.table.tokens.push_back(std::move(key));
            members.push_back(std::move(rows));
        }
    }
    out.table.vectors.resize(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(n * d));
    for (std::size_t g = 0; g < members.size(); ++g) {
        for (std::size_t k = 0; k < n; ++k) {
            out.table.vectors.row(static_cast<Eigen::Index>(g))
                .segment(static_cast<Eigen::Index>(k * d), static_cast<Eigen::Index>(d)) =
                table.vectors.row(static_cast<Eigen::Index>(members[g][k]));
        }
    }
    return out;
}

PointCloud to_point_cloud(const EmbeddingTable& table, Provenance meta) {
    if (meta.generator.empty()) meta.generator = "embedding";
    return PointCloud(table.vectors, std::move(meta));
}

}  // namespace dimscope
