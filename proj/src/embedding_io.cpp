#include <charconv>
#include <fstream>
#include <sstream>

#include "dimscope/cloud_io.hpp"
#include "dimscope/error.hpp"
#include "dimscope/lsa.hpp"

namespace dimscope {

namespace {

double parse_value(std::string_view text, const std::string& where) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError(where + ": cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> fields_of(std::string_view line) {
    const char sep = line.find('\t') != std::string_view::npos ? '\t' : ' ';
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        const std::size_t end = std::min(line.find(sep, start), line.size());
        if (end > start || sep == '\t') out.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

}  // namespace

void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << "#dim=" << table.dim() << " #sigma=";
    for (std::size_t i = 0; i < table.singular_values.size(); ++i) {
        if (i) out << ',';
        out << format_real(table.singular_values[i]);
    }
    out << '\n';
    std::string line;
    for (std::size_t r = 0; r < table.size(); ++r) {
        line = table.tokens[r];
        for (std::size_t k = 0; k < table.dim(); ++k) {
            line += '\t';
            line += format_real(table.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)));
        }
        out << line << '\n';
    }
    if (!out) throw FormatError("write failed: " + path.string());
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open embeddings: " + path.string());
    EmbeddingTable table;
    std::size_t dim = 0;
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (line.front() == '#') {
            std::istringstream hs(line);
            std::string item;
            while (hs >> item) {
                if (item.rfind("#dim=", 0) == 0) {
                    dim = static_cast<std::size_t>(parse_value(item.substr(5), where));
                } else if (item.rfind("#sigma=", 0) == 0) {
                    const std::string list = item.substr(7);
                    std::size_t start = 0;
                    while (start < list.size()) {
                        const std::size_t end = std::min(list.find(',', start), list.size());
                        table.singular_values.push_back(parse_value(std::string_view(list).substr(start, end - start), where));
                        start = end + 1;
                    }
                }
            }
            continue;
        }
        const auto fields = fields_of(line);
        // word2vec text files open with "<count> <dim>".
        if (line_no == 1 && fields.size() == 2 && line.find('\t') == std::string::npos) {
            std::size_t a = 0;
            const auto r = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), a);
            if (r.ec == std::errc{} && r.ptr == fields[0].data() + fields[0].size()) continue;
        }
        if (fields.size() < 2) throw FormatError(where + ": expected a token followed by values");
        if (dim == 0) dim = fields.size() - 1;
        if (fields.size() - 1 != dim) {
            throw FormatError(where + ": expected " + std::to_string(dim) + " values, found " +
                              std::to_string(fields.size() - 1));
        }
        table.tokens.emplace_back(fields[0]);
        for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(parse_value(fields[k], where));
    }
    if (table.tokens.empty()) throw FormatError(path.string() + ": no embedding rows");
    table.vectors = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(table.tokens.size()),
                                             static_cast<Eigen::Index>(dim));
    return table;
}

}  // namespace dimscope
