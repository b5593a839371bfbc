#ifndef QSR_CLI_MANIFEST_HPP
#define QSR_CLI_MANIFEST_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace qsr::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Hex SHA-256 of a file's bytes. Throws ValidationError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// Everything needed to re-run a command. Written as manifest.json (or
/// gen-manifest.json for `generate`), one per output directory.
struct RunManifest {
    std::string command;
    std::vector<std::string> args;
    nlohmann::json config;  // generator config snapshot, null for ingested input
    std::uint64_t seed = 0;
    std::map<std::string, std::string> input_digests;  // name -> sha256
    unsigned workers = 1;
    std::string timestamp;  // UTC, ISO 8601; the only non-reproducible field

    nlohmann::json to_json() const;
};

std::string utc_timestamp();

/// Files staged in memory and published together. commit() writes each
/// file to a temporary sibling and renames it into place, so a failed run
/// leaves no partial files behind.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path root) : root_(std::move(root)) {}

    void add(const std::string& relative, std::string content);
    void commit() const;

    const std::map<std::string, std::string>& files() const noexcept { return files_; }

private:
    std::filesystem::path root_;
    std::map<std::string, std::string> files_;
};

}  // namespace qsr::cli

#endif  // QSR_CLI_MANIFEST_HPP
