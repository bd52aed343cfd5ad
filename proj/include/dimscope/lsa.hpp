#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dimscope/point_cloud.hpp"

namespace dimscope {

using TokenSet = std::unordered_set<std::string>;

/// Pre-tokenised documents; tokenisation and lemmatisation happen upstream.
struct Corpus {
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> documents;
};

/// One document per regular file (sorted by file name), whitespace tokens.
Corpus load_corpus_directory(const std::filesystem::path& dir);
/// One {"id": ..., "tokens": [...]} object per line.
Corpus load_corpus_jsonl(const std::filesystem::path& file);
/// Directory or .jsonl file.
Corpus load_corpus(const std::filesystem::path& path);
/// One token per line; blank lines ignored.
TokenSet load_stopwords(const std::filesystem::path& file);

/// Removes stopwords from every document (empty documents are kept).
Corpus filter_stopwords(const Corpus& corpus, const TokenSet& stopwords);

struct CountMatrix {
    std::vector<std::string> vocabulary;  ///< first-occurrence order
    std::vector<std::string> document_ids;
    Eigen::SparseMatrix<std::int64_t> counts;  ///< M x N, words by documents
    std::vector<std::int64_t> row_totals;      ///< tau_i
    std::vector<std::int64_t> col_totals;      ///< filtered document lengths
    std::size_t dropped_documents = 0;         ///< empty after filtering

    std::size_t words() const { return vocabulary.size(); }
    std::size_t docs() const { return col_totals.size(); }
};

/// Documents left empty by the stopword filter are dropped and counted.
/// Throws InvalidArgument when fewer than two documents remain.
CountMatrix count_matrix(const Corpus& corpus, const TokenSet& stopwords = {});

/// Normalised entropy of each word's distribution over documents.
Eigen::VectorXd entropy_weights(const CountMatrix& counts);

/// w_ij = (1 - eps_i) * n_ij / col_total_j.
Eigen::SparseMatrix<double> weight_matrix(const CountMatrix& counts, const Eigen::VectorXd& eps);

struct EmbeddingTable {
    std::vector<std::string> tokens;
    Matrix vectors;                       ///< one row per token
    std::vector<double> singular_values;  ///< descending; empty for n-gram tables

    std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
    std::size_t size() const { return tokens.size(); }
    /// Row index for each token.
    std::unordered_map<std::string, std::size_t> index() const;
};

/// Top-d left singular vectors of the weight matrix as word embeddings.
EmbeddingTable embed_words(const CountMatrix& counts, const Eigen::SparseMatrix<double>& weights, std::size_t d);

/// First d2 coordinates and singular values.
EmbeddingTable truncate_embeddings(const EmbeddingTable& table, std::size_t d2);

struct NgramEmbeddings {
    EmbeddingTable table;  ///< tokens are constituents joined by a single space
    std::size_t oov_skipped = 0;  ///< n-gram occurrences with an unknown constituent
};

/// Unique within-document n-grams in first-occurrence order, each embedded
/// as the concatenation of its constituents' vectors.
NgramEmbeddings ngram_embeddings(const Corpus& corpus, const EmbeddingTable& table, std::size_t n);

/// Table rows as a point cloud.
PointCloud to_point_cloud(const EmbeddingTable& table, Provenance meta = {});

// TSV: "#dim=d #sigma=s1,...,sd" header, then token\tv0\t...\tv{d-1}.
// The header is optional on input so externally trained vectors load as-is.
void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);
EmbeddingTable read_embeddings(const std::filesystem::path& path);

}  // namespace dimscope
