#pragma once

#include "ppcal/errors.hpp"
#include "ppcal/transform.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <string_view>

namespace ppcal::io {

/// Shortest text that parses back to exactly `x`.
inline std::string number_text(double x) { return fmt::format("{}", x); }

inline std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

namespace yaml {

inline ParseError error_at(const YAML::Node& n, const std::string& message) {
    const auto m = n.Mark();
    if (m.is_null()) return ParseError(message, 0, 0);
    return ParseError(message, m.line + 1, m.column + 1);
}

inline YAML::Node load(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
}

inline void require_map(const YAML::Node& n, std::string_view where) {
    if (!n.IsMap()) throw error_at(n, std::string(where) + " must be a mapping");
}

/// Rejects keys outside `allowed`, reporting the offending key's position.
inline void check_keys(const YAML::Node& n, std::initializer_list<std::string_view> allowed, std::string_view where) {
    require_map(n, where);
    for (auto it = n.begin(); it != n.end(); ++it) {
        const auto key = it->first.as<std::string>();
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw error_at(it->first, "unknown key '" + key + "' in " + std::string(where));
    }
}

inline const YAML::Node required(const YAML::Node& map, const char* key, std::string_view where) {
    const YAML::Node n = map[key];
    if (!n) throw error_at(map, "missing key '" + std::string(key) + "' in " + std::string(where));
    return n;
}

inline double number(const YAML::Node& n, std::string_view what) {
    if (!n.IsScalar()) throw error_at(n, std::string(what) + " must be a number");
    double v = 0.0;
    try {
        v = n.as<double>();
    } catch (const YAML::Exception&) {
        throw error_at(n, std::string(what) + " is not a number: '" + n.Scalar() + "'");
    }
    if (!std::isfinite(v)) throw error_at(n, std::string(what) + " must be finite");
    return v;
}

inline long integer(const YAML::Node& n, std::string_view what) {
    const double v = number(n, what);
    if (v != std::floor(v)) throw error_at(n, std::string(what) + " must be an integer");
    return static_cast<long>(v);
}

inline bool boolean(const YAML::Node& n, std::string_view what) {
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        throw error_at(n, std::string(what) + " must be true or false");
    }
}

inline std::string text(const YAML::Node& n, std::string_view what) {
    if (!n.IsScalar()) throw error_at(n, std::string(what) + " must be a string");
    return n.Scalar();
}

template <std::size_t N>
std::array<double, N> numbers(const YAML::Node& n, std::string_view what) {
    if (!n.IsSequence() || n.size() != N)
        throw error_at(n, std::string(what) + " must be a list of " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t k = 0; k < N; ++k) out[k] = number(n[k], what);
    return out;
}

inline Vector3 vector3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

template <std::size_t N>
std::string flow(const std::array<double, N>& a) {
    std::string out = "[";
    for (std::size_t k = 0; k < N; ++k) out += (k ? ", " : "") + number_text(a[k]);
    return out + "]";
}

}  // namespace yaml
}  // namespace ppcal::io
