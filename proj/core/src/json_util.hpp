#pragma once

// Helpers shared by the modules that read JSON inputs. Not installed.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "deployopt/error.hpp"

namespace deployopt::detail {

using json = nlohmann::json;

/// Reads a whole file; throws IoError with `<prefix>_IO`.
inline std::string read_text_file(const std::filesystem::path& path, std::string_view prefix) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(std::string(prefix) + "_IO", "cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError(std::string(prefix) + "_IO", "error while reading '" + path.string() + "'");
    }
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text,
                            std::string_view code = "OUTPUT_IO") {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(std::string(code), "cannot write '" + path.string() + "'");
    out << text;
    out.flush();
    if (!out) throw IoError(std::string(code), "error while writing '" + path.string() + "'");
}

/// Parses JSON; syntax errors become FormatError with `<prefix>_FORMAT`.
inline json parse_json(std::string_view text, std::string_view prefix, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string(prefix) + "_FORMAT", where + ": " + e.what());
    }
}

/// First key of `obj` that is not in `known`, or empty.
inline std::string first_unknown_key(const json& obj, std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : obj.items()) {
        bool found = false;
        for (auto k : known) found = found || k == key;
        if (!found) return key;
    }
    return {};
}

/// Canonical JSON text: 4-space indent, sorted keys, trailing newline.
inline std::string canonical_dump(const json& j) { return j.dump(4) + "\n"; }

}  // namespace deployopt::detail
