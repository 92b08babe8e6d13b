#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace spanforge {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

}  // namespace spanforge
