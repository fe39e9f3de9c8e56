#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace greenprem::cli {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

/// Run provenance embedded in every output file as comment lines.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::optional<std::uint64_t> rng_seed;
    std::vector<std::pair<std::string, std::string>> inputs; ///< file name, sha256

    /// Comment lines "manifest: {json}" and "manifest-sha256: <hex>".
    /// The timestamp comes from SOURCE_DATE_EPOCH so reruns stay byte-identical.
    std::vector<std::string> comment_lines() const;
};

} // namespace greenprem::cli
