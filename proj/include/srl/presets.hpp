#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace srl::presets {

/// Resolves a preset name (or passes through an existing path). Search order:
/// explicit path, $SRL_PRESETS_DIR, the directory next to the executable
/// (../presets), then the compiled-in source location.
std::filesystem::path resolve(const std::string& name_or_path,
                              const std::filesystem::path& exe_dir = {});

std::vector<std::string> available(const std::filesystem::path& exe_dir = {});

}  // namespace srl::presets
