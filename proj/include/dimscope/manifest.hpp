#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dimscope {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Everything needed to rerun a command: argv, resolved options, seeds,
/// input digests, tool version and timing. Written next to the primary
/// output as <stem>.manifest.json.
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> argv);

    void set_config(std::string resolved_options, const std::filesystem::path& config_file);
    void add_seed(const std::string& name, std::uint64_t value);
    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void set_threads(unsigned threads);
    void add_note(const std::string& key, nlohmann::json value);

    /// File name (not path) that outputs use to reference this manifest.
    static std::string name_for(const std::filesystem::path& primary_output);
    /// Records outputs' digests and elapsed time, then writes the manifest.
    std::filesystem::path write(const std::filesystem::path& primary_output);

private:
    nlohmann::json doc_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace dimscope
