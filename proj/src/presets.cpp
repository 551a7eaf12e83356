#include "srl/presets.hpp"

#include <cstdlib>
#include <set>

#include "srl/errors.hpp"

#ifndef SRL_SOURCE_PRESETS
#define SRL_SOURCE_PRESETS ""
#endif

namespace srl::presets {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> search_dirs(const fs::path& exe_dir) {
    std::vector<fs::path> dirs;
    if (const char* env = std::getenv("SRL_PRESETS_DIR")) dirs.emplace_back(env);
    if (!exe_dir.empty()) {
        dirs.push_back(exe_dir / "presets");
        dirs.push_back(exe_dir.parent_path() / "presets");
    }
    dirs.emplace_back("presets");
    if (fs::path src{SRL_SOURCE_PRESETS}; !src.empty()) dirs.push_back(src);
    return dirs;
}

}  // namespace

fs::path resolve(const std::string& name_or_path, const fs::path& exe_dir) {
    const fs::path direct{name_or_path};
    if (fs::exists(direct) && fs::is_regular_file(direct)) return direct;
    for (const auto& dir : search_dirs(exe_dir)) {
        const fs::path candidate = dir / (name_or_path + ".toml");
        if (fs::exists(candidate)) return candidate;
    }
    std::string known;
    for (const auto& name : available(exe_dir)) known += " " + name;
    throw ConfigError("preset '" + name_or_path + "' not found; available:" +
                      (known.empty() ? " (none)" : known));
}

std::vector<std::string> available(const fs::path& exe_dir) {
    std::set<std::string> names;
    for (const auto& dir : search_dirs(exe_dir)) {
        if (!fs::is_directory(dir)) continue;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".toml") {
                names.insert(entry.path().stem().string());
            }
        }
    }
    return {names.begin(), names.end()};
}

}  // namespace srl::presets
