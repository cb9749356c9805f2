#pragma once

#include <filesystem>
#include <string>

#include "din/network.hpp"

namespace din {

/// Current model file format version.
inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document with a checksum over the model payload. Channel
/// matrices are written row-major at full round-trip precision.
std::string model_to_json(const DINModel& model);
DINModel model_from_json(const std::string& text);

void save_model(const DINModel& model, const std::filesystem::path& path);
DINModel load_model(const std::filesystem::path& path);

}  // namespace din
