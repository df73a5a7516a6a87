#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polpair::cli {

/*!
 * Flat key = value configuration with dotted keys.
 *
 * Blank lines and lines starting with '#' are skipped. Keys must appear in
 * the known key table (see known_keys()); anything else is a ConfigError, as
 * are duplicate keys. List values are comma separated.
 */
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::optional<std::string>& fallback = {}) const;
    double get_double(const std::string& key, const std::optional<double>& fallback = {}) const;
    int get_int(const std::string& key, const std::optional<int>& fallback = {}) const;
    bool get_bool(const std::string& key, const std::optional<bool>& fallback = {}) const;
    std::vector<double> get_list(const std::string& key) const;

    // Canonical "key=value\n" lines in key order.
    std::string canonical() const;
    // FNV-1a 64 of canonical(), as 16 hex digits.
    std::string hash() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::string origin_;
    std::map<std::string, std::string> entries_;

    const std::string& raw(const std::string& key) const;
};

const std::vector<std::string>& known_keys();

std::uint64_t fnv1a64(const std::string& data);

}  // namespace polpair::cli
