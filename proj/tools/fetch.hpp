#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace din::fetch {

/// Whole body of a URL (http, https or file). Throws din::Error on failure.
std::string download(const std::string& url);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

struct ZipEntry {
  std::string name;
  std::string data;
};

/// Entries of a zip archive whose names end with `suffix` (case-insensitive).
/// Handles stored and deflated members, which is all the UCI archives use.
std::vector<ZipEntry> unzip(const std::string& archive, const std::string& suffix);

}  // namespace din::fetch
