#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef DEPLOYOPT_FIXTURE_DIR
#error "DEPLOYOPT_FIXTURE_DIR must be defined by the build"
#endif

namespace fixtures {

inline std::filesystem::path dir() { return DEPLOYOPT_FIXTURE_DIR; }
inline std::filesystem::path path(const std::string& name) { return dir() / name; }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read(const std::string& name) { return read_file(path(name)); }

/// Contents of golden/<name>. With UPDATE_GOLDENS set in the environment the
/// file is (re)written from `actual` first, for review before committing.
inline std::string golden(const std::string& name, const std::string& actual) {
    const auto p = path("golden") / name;
    if (std::getenv("UPDATE_GOLDENS") != nullptr) {
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << actual;
    }
    return read_file(p);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("deployopt-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fixtures
