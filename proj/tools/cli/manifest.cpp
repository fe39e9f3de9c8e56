#include "manifest.hpp"

#include "config.hpp"
#include "version.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace greenprem::cli {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::vector<std::string> RunManifest::comment_lines() const {
    nlohmann::ordered_json j;
    j["tool"] = "greenprem";
    j["version"] = std::string(version);
    j["command"] = command;
    j["rng_seed"] = rng_seed ? nlohmann::ordered_json(*rng_seed) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& [name, hash] : inputs) {
        files.push_back({{"file", std::filesystem::path(name).filename().string()}, {"sha256", hash}});
    }
    j["inputs"] = files;
    j["config"] = config;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
        const std::time_t t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        j["timestamp"] = buf;
    } else {
        j["timestamp"] = nullptr;
    }
    const std::string text = j.dump();
    return {"manifest: " + text, "manifest-sha256: " + sha256_hex(text)};
}

} // namespace greenprem::cli
