#include "cli/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>
#include <unistd.h>

#include "qsr/error.hpp"

namespace qsr::cli {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read input file " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

nlohmann::json RunManifest::to_json() const {
    return {
        {"command", command},
        {"args", args},
        {"config", config},
        {"seed", seed},
        {"tool_version", kToolVersion},
        {"input_digests", input_digests},
        {"workers", workers},
        {"timestamp", timestamp},
    };
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void OutputSet::add(const std::string& relative, std::string content) {
    files_[relative] = std::move(content);
}

void OutputSet::commit() const {
    namespace fs = std::filesystem;
    for (const auto& [relative, content] : files_) {
        const fs::path target = root_ / relative;
        fs::create_directories(target.parent_path());
        fs::path tmp = target;
        tmp += ".tmp-" + std::to_string(::getpid());
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.flush();
            if (!out) {
                std::error_code ec;
                fs::remove(tmp, ec);
                throw std::runtime_error("failed writing " + target.string());
            }
        }
        fs::rename(tmp, target);
    }
}

}  // namespace qsr::cli
