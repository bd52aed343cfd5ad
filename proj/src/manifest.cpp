#include "dimscope/manifest.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "dimscope/error.hpp"

namespace dimscope {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        std::array<char, 3> pair{};
        std::snprintf(pair.data(), pair.size(), "%02x", md[i]);
        hex += pair.data();
    }
    return hex;
}

namespace {

nlohmann::json file_entry(const fs::path& path) {
    return {{"path", path.string()}, {"bytes", fs::file_size(path)}, {"sha256", sha256_file(path)}};
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

}  // namespace

RunManifest::RunManifest(std::string command, std::vector<std::string> argv) : start_(std::chrono::steady_clock::now()) {
    doc_ = {{"schema_version", 1},
            {"tool", "dimscope"},
            {"version", DIMSCOPE_VERSION},
            {"command", std::move(command)},
            {"argv", std::move(argv)},
            {"seeds", nlohmann::json::object()},
            {"inputs", nlohmann::json::array()},
            {"outputs", nlohmann::json::array()},
            {"started_utc", utc_now()}};
}

void RunManifest::set_config(std::string resolved_options, const fs::path& config_file) {
    doc_["config"] = std::move(resolved_options);
    if (!config_file.empty()) doc_["config_file"] = file_entry(config_file);
}

void RunManifest::add_seed(const std::string& name, std::uint64_t value) { doc_["seeds"][name] = value; }

void RunManifest::add_input(const fs::path& path) {
    if (fs::is_directory(path)) {
        // Directory inputs (corpora) are digested file by file in name order.
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(path)) {
            if (e.is_regular_file()) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        nlohmann::json members = nlohmann::json::array();
        for (const auto& f : files) members.push_back(file_entry(f));
        doc_["inputs"].push_back({{"path", path.string()}, {"files", std::move(members)}});
        return;
    }
    doc_["inputs"].push_back(file_entry(path));
}

void RunManifest::add_output(const fs::path& path) { doc_["outputs"].push_back(path.string()); }

void RunManifest::set_threads(unsigned threads) { doc_["threads"] = threads; }

void RunManifest::add_note(const std::string& key, nlohmann::json value) { doc_["notes"][key] = std::move(value); }

std::string RunManifest::name_for(const fs::path& primary_output) {
    return primary_output.stem().string() + ".manifest.json";
}

fs::path RunManifest::write(const fs::path& primary_output) {
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& p : doc_["outputs"]) outputs.push_back(file_entry(p.get<std::string>()));
    doc_["outputs"] = std::move(outputs);
    doc_["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const fs::path path = primary_output.parent_path() / name_for(primary_output);
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << doc_.dump(2) << '\n';
    return path;
}

}  // namespace dimscope
