#include "dimscope/cloud_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dimscope/error.hpp"

namespace dimscope {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'I', 'M', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_unsigned_v<T>);
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw FormatError("binary cloud: truncated file");
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
    return value;
}

double parse_real(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw FormatError("cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::string format_real(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
    std::string line;
    for (std::size_t k = 0; k < cloud.d(); ++k) {
        if (k) line += ',';
        line += 'x';
        line += std::to_string(k);
    }
    out << line << '\n';
    for (std::size_t i = 0; i < cloud.n(); ++i) {
        line.clear();
        const double* row = cloud.row(i);
        for (std::size_t k = 0; k < cloud.d(); ++k) {
            if (k) line += ',';
            line += format_real(row[k]);
        }
        out << line << '\n';
    }
}

PointCloud read_cloud_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("csv cloud: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] != "x" + std::to_string(k)) throw FormatError("csv cloud: header must be x0,x1,...");
    }
    const std::size_t d = header.size();
    std::vector<double> values;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != d) {
            throw FormatError("csv cloud: row " + std::to_string(n + 1) + " has " + std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(d));
        }
        for (auto f : fields) values.push_back(parse_real(f));
        ++n;
    }
    if (n == 0) throw FormatError("csv cloud: no points");
    Matrix points = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    return PointCloud(std::move(points));
}

void write_cloud_binary(std::ostream& out, const PointCloud& cloud) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint64_t>(out, cloud.n());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cloud.d()));
    const double* data = cloud.points().data();
    for (std::size_t i = 0; i < cloud.n() * cloud.d(); ++i) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(data[i]));
}

PointCloud read_cloud_binary(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw FormatError("binary cloud: bad magic");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kVersion) throw FormatError("binary cloud: unsupported version " + std::to_string(version));
    const auto n = get_le<std::uint64_t>(in);
    const auto d = get_le<std::uint32_t>(in);
    if (n == 0 || d == 0) throw FormatError("binary cloud: empty shape");
    Matrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < points.size(); ++i) points.data()[i] = std::bit_cast<double>(get_le<std::uint64_t>(in));
    return PointCloud(std::move(points));
}

CloudFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? CloudFormat::csv : CloudFormat::binary;
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    if (format == CloudFormat::csv) {
        write_cloud_csv(out, cloud);
    } else {
        write_cloud_binary(out, cloud);
    }
    if (!out) throw FormatError("failed writing " + path.string());
}

PointCloud read_cloud(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::array<char, 4> head{};
    in.read(head.data(), head.size());
    const bool binary = in.gcount() == 4 && head == kMagic;
    in.clear();
    in.seekg(0);
    return binary ? read_cloud_binary(in) : read_cloud_csv(in);
}

}  // namespace dimscope
