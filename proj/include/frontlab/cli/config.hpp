#pragma once

// Scenario files: [section] headers, key = value lines, '#' comments.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace frontlab::cli {

/// Usage or configuration problem; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigEntry {
    std::string value;
    int line = 0;
};

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    const std::string last = trim(cur);
    if (!last.empty() || !out.empty()) {
        out.push_back(last);
    }
    return out;
}

class Config {
public:
    static Config parse(std::istream& in, const std::string& origin) {
        Config cfg;
        cfg.origin_ = origin;
        std::string raw;
        std::string section;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (text.empty()) {
                continue;
            }
            if (text.front() == '[') {
                if (text.back() != ']' || text.size() < 3) {
                    throw ConfigError(fmt::format("{}:{}: malformed section header '{}'", origin, line, text));
                }
                section = trim(text.substr(1, text.size() - 2));
                if (cfg.sections_.count(section)) {
                    throw ConfigError(fmt::format("{}:{}: duplicate section [{}]", origin, line, section));
                }
                cfg.sections_[section];
                cfg.section_line_[section] = line;
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(fmt::format("{}:{}: expected 'key = value', got '{}'", origin, line, text));
            }
            if (section.empty()) {
                throw ConfigError(fmt::format("{}:{}: entry outside of any section", origin, line));
            }
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(fmt::format("{}:{}: empty key", origin, line));
            }
            auto& sec = cfg.sections_[section];
            if (sec.count(key)) {
                throw ConfigError(fmt::format("{}:{}: duplicate key '{}' in [{}]", origin, line, key, section));
            }
            sec[key] = {value, line};
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError(fmt::format("cannot open config '{}'", path));
        }
        return parse(in, path);
    }

    static Config from_string(const std::string& text, const std::string& origin = "<string>") {
        std::istringstream in(text);
        return parse(in, origin);
    }

    const std::string& origin() const { return origin_; }
    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
    bool has(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(k) > 0;
    }

    void require_section(const std::string& s) const {
        if (!has_section(s)) {
            throw ConfigError(fmt::format("{}: missing section [{}]", origin_, s));
        }
    }

    /// Rejects sections and keys outside the schema.
    void check_schema(const std::map<std::string, std::set<std::string>>& schema) const {
        for (const auto& [sec, entries] : sections_) {
            auto it = schema.find(sec);
            if (it == schema.end()) {
                throw ConfigError(fmt::format("{}:{}: unknown section [{}]", origin_, section_line_.at(sec), sec));
            }
            for (const auto& [key, e] : entries) {
                if (!it->second.count(key)) {
                    throw ConfigError(fmt::format("{}:{}: unknown key '{}' in [{}]", origin_, e.line, key, sec));
                }
            }
        }
    }

    std::optional<ConfigEntry> entry(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        if (it == sections_.end()) {
            return std::nullopt;
        }
        auto jt = it->second.find(k);
        if (jt == it->second.end()) {
            return std::nullopt;
        }
        return jt->second;
    }

    std::string where(const std::string& s, const std::string& k) const {
        if (auto e = entry(s, k)) {
            return fmt::format("{}:{}", origin_, e->line);
        }
        return fmt::format("{} [{}] {}", origin_, s, k);
    }

    std::string get_string(const std::string& s, const std::string& k, const std::string& fallback) const {
        auto e = entry(s, k);
        return e ? e->value : fallback;
    }

    double get_double(const std::string& s, const std::string& k, double fallback) const {
        auto e = entry(s, k);
        return e ? to_double(e->value, s, k, e->line) : fallback;
    }

    long get_int(const std::string& s, const std::string& k, long fallback) const {
        auto e = entry(s, k);
        return e ? to_int(e->value, s, k, e->line) : fallback;
    }

    bool get_bool(const std::string& s, const std::string& k, bool fallback) const {
        auto e = entry(s, k);
        if (!e) {
            return fallback;
        }
        std::string v = e->value;
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "true" || v == "yes" || v == "on" || v == "1") {
            return true;
        }
        if (v == "false" || v == "no" || v == "off" || v == "0") {
            return false;
        }
        throw ConfigError(fmt::format("{}:{}: [{}] {} expects a boolean, got '{}'", origin_, e->line, s, k, e->value));
    }

    std::vector<double> get_doubles(const std::string& s, const std::string& k, std::vector<double> fallback) const {
        auto e = entry(s, k);
        if (!e) {
            return fallback;
        }
        std::vector<double> out;
        for (const auto& item : split_list(e->value)) {
            out.push_back(to_double(item, s, k, e->line));
        }
        return out;
    }

    std::vector<long> get_ints(const std::string& s, const std::string& k, std::vector<long> fallback) const {
        auto e = entry(s, k);
        if (!e) {
            return fallback;
        }
        std::vector<long> out;
        for (const auto& item : split_list(e->value)) {
            out.push_back(to_int(item, s, k, e->line));
        }
        return out;
    }

    /// Copy with one value replaced (or added); used by sweeps.
    Config with(const std::string& s, const std::string& k, const std::string& value) const {
        Config c = *this;
        auto& sec = c.sections_[s];
        const int line = sec.count(k) ? sec[k].line : 0;
        sec[k] = {value, line};
        return c;
    }

private:
    double to_double(const std::string& text, const std::string& s, const std::string& k, int line) const {
        double v = 0.0;
        const char* first = text.data();
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || text.empty()) {
            throw ConfigError(fmt::format("{}:{}: [{}] {} expects a number, got '{}'", origin_, line, s, k, text));
        }
        return v;
    }

    long to_int(const std::string& text, const std::string& s, const std::string& k, int line) const {
        long v = 0;
        const char* first = text.data();
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || text.empty()) {
            throw ConfigError(fmt::format("{}:{}: [{}] {} expects an integer, got '{}'", origin_, line, s, k, text));
        }
        return v;
    }

    std::string origin_;
    std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
    std::map<std::string, int> section_line_;
};

}  // namespace frontlab::cli
