#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aima/core/error.hpp"

namespace aima {

using Json = nlohmann::json;

inline Json load_json(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path.string());
    try {
        return Json::parse(f);
    } catch (const std::exception& e) {
        throw IoError("json parse failure in " + path.string() + ": " + e.what());
    }
}

inline void save_json(const std::filesystem::path& path, const Json& j, int indent = 2) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for write: " + path.string());
    f << j.dump(indent) << "\n";
    if (!f) throw IoError("write failed: " + path.string());
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + path.string());
    f << text;
}

/// Sets j[dotted.path] = value, creating objects along the way.
/// "model.patch=8" style override support for the CLI.
inline void set_by_dotted_path(Json& j, const std::string& dotted, const std::string& raw_value) {
    Json* cur = &j;
    std::size_t start = 0;
    for (;;) {
        std::size_t dot = dotted.find('.', start);
        std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("bad override key: '" + dotted + "'");
        if (dot == std::string::npos) {
            Json parsed = Json::parse(raw_value, nullptr, false);
            (*cur)[key] = parsed.is_discarded() ? Json(raw_value) : parsed;
            return;
        }
        cur = &(*cur)[key];
        if (!cur->is_object() && !cur->is_null()) throw ConfigError("override key '" + dotted + "' crosses a non-object");
        start = dot + 1;
    }
}

}  // namespace aima
