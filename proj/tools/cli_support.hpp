#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace l2v::cli {

std::string sha256_hex(const std::vector<std::uint8_t>& bytes);
std::string sha256_file(const std::filesystem::path& path);

std::vector<std::uint8_t> to_bytes(const std::string& text);

/// Collects every output of one invocation in memory and publishes them
/// together: each file is written to a sibling temp path, then all are
/// renamed into place. Nothing is written if commit() is never reached.
class OutputSet {
public:
    void add(std::filesystem::path path, std::vector<std::uint8_t> bytes);
    void add_text(std::filesystem::path path, const std::string& text) { add(std::move(path), to_bytes(text)); }

    /// Digest records for the manifest, in insertion order.
    nlohmann::json digests() const;

    void commit() const;

private:
    std::vector<std::pair<std::filesystem::path, std::vector<std::uint8_t>>> files_;
};

/// Manifest skeleton. `timestamp` is the only field that varies between
/// identical runs.
class Manifest {
public:
    explicit Manifest(std::string subcommand);

    void add_input(const std::filesystem::path& path);
    nlohmann::json& config() { return doc_["config"]; }
    nlohmann::json& results() { return doc_["results"]; }

    std::string render(const OutputSet& outputs) const;

    static constexpr int kSchemaVersion = 1;

private:
    nlohmann::json doc_;
};

nlohmann::json load_json_file(const std::filesystem::path& path);

std::vector<int> parse_tokens(const std::string& text);

}  // namespace l2v::cli
