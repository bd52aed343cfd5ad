#pragma once

#include <filesystem>
#include <iosfwd>

#include "dimscope/point_cloud.hpp"

namespace dimscope {

enum class CloudFormat { csv, binary };

// CSV: header x0,...,x{d-1}; 17 significant digits per value.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);
PointCloud read_cloud_csv(std::istream& in);

// Binary: "DIMC", u32 version (1), u64 n, u32 d, n*d little-endian f64, row-major.
void write_cloud_binary(std::ostream& out, const PointCloud& cloud);
PointCloud read_cloud_binary(std::istream& in);

/// Format from extension: ".csv" is CSV, anything else binary.
CloudFormat format_for_path(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format);
/// Sniffs the magic bytes, so the extension does not matter.
PointCloud read_cloud(const std::filesystem::path& path);

/// Shortest-safe decimal text for a double (17 significant digits).
std::string format_real(double value);

}  // namespace dimscope
