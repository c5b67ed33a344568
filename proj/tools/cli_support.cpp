#include "cli_support.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "l2v/error.hpp"
#include "l2v/version.hpp"

namespace l2v::cli {

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        fail(ErrorKind::io, "SHA-256 computation failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

std::vector<std::uint8_t> to_bytes(const std::string& text) { return {text.begin(), text.end()}; }

void OutputSet::add(std::filesystem::path path, std::vector<std::uint8_t> bytes) {
    files_.emplace_back(std::move(path), std::move(bytes));
}

nlohmann::json OutputSet::digests() const {
    auto out = nlohmann::json::array();
    for (const auto& [path, bytes] : files_) out.push_back({{"path", path.string()}, {"sha256", sha256_hex(bytes)}});
    return out;
}

void OutputSet::commit() const {
    std::vector<std::filesystem::path> staged;
    auto cleanup = [&] {
        std::error_code ignored;
        for (const auto& p : staged) std::filesystem::remove(p, ignored);
    };
    for (const auto& [path, bytes] : files_) {
        auto tmp = path;
        tmp += ".partial";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            cleanup();
            fail(ErrorKind::io, "cannot open " + tmp.string() + " for writing");
        }
        staged.push_back(tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) {
            cleanup();
            fail(ErrorKind::io, "write failure on " + tmp.string());
        }
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
        std::error_code ec;
        std::filesystem::rename(staged[i], files_[i].first, ec);
        if (ec) {
            cleanup();
            fail(ErrorKind::io, "cannot move output into place at " + files_[i].first.string());
        }
    }
}

Manifest::Manifest(std::string subcommand) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream ts;
    ts << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");

    doc_ = {{"schema_version", kSchemaVersion},
            {"toolkit", {{"name", kToolkitName}, {"version", kToolkitVersion}}},
            {"subcommand", std::move(subcommand)},
            {"timestamp", ts.str()},
            {"config", nlohmann::json::object()},
            {"inputs", nlohmann::json::array()},
            {"results", nlohmann::json::object()}};
}

void Manifest::add_input(const std::filesystem::path& path) {
    doc_["inputs"].push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

std::string Manifest::render(const OutputSet& outputs) const {
    auto doc = doc_;
    doc["outputs"] = outputs.digests();
    return doc.dump(2) + "\n";
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::format, path.string() + ": malformed JSON: " + e.what());
    }
}

std::vector<int> parse_tokens(const std::string& text) {
    std::vector<int> tokens;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            tokens.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            fail(ErrorKind::usage, "bad token id '" + item + "'");
        }
    }
    if (tokens.empty()) fail(ErrorKind::usage, "empty token list");
    return tokens;
}

}  // namespace l2v::cli
