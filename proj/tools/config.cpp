#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "polpair/errors.hpp"

namespace polpair::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    if (t.empty()) {
        throw ConfigError(fmt::format("{}: empty number", what));
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(fmt::format("{}: '{}' is not a finite number", what, t));
    }
    return v;
}

}  // namespace

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys = {
        "medium.name",
        "medium.sellmeier.a",
        "medium.sellmeier.l_um",
        "medium.omega0",
        "medium.chi0",
        "medium.pole_guard",
        "medium.max_iter",

        "perturbation.kind",
        "perturbation.dchi0",
        "perturbation.sigma_rho",
        "perturbation.sigma_z",
        "perturbation.v",
        "perturbation.T",
        "perturbation.eta",
        "perturbation.a",
        "perturbation.file",
        "perturbation.envelope.sigma",

        "grid.k.min",
        "grid.k.max",
        "grid.k.count",
        "grid.k.spacing",
        "grid.omega.min",
        "grid.omega.max",
        "grid.omega.count",
        "grid.omega.spacing",
        "grid.omega_prime.min",
        "grid.omega_prime.max",
        "grid.omega_prime.count",
        "grid.omega_prime.spacing",
        "grid.theta.min",
        "grid.theta.max",
        "grid.theta.count",
        "grid.theta_prime.min",
        "grid.theta_prime.max",
        "grid.theta_prime.count",

        "spectrum.axes",
        "spectrum.branch",
        "spectrum.partner_branch",
        "spectrum.theta",
        "spectrum.theta_prime",
        "spectrum.delta_phi",
        "spectrum.volume",
        "spectrum.observation_time",
        "spectrum.rel_tol",
        "spectrum.k_scale",

        "rate.branch",
        "rate.partner_branch",
        "rate.delta_phi",
        "rate.partner_band.min",
        "rate.partner_band.max",
        "rate.scan_nodes",
        "rate.v_sweep.min",
        "rate.v_sweep.max",
        "rate.v_sweep.count",
        "rate.v_sweep.omega",
        "rate.v_sweep.theta",
        "rate.v_sweep.theta_prime",

        "cones.v",

        "ft.samples",
        "ft.window",
        "ft.rows",
        "ft.threshold",

        "output.svg",
    };
    return keys;
}

Config Config::parse(const std::string& text, const std::string& origin)
{
    Config c;
    c.origin_ = origin;
    const auto& keys = known_keys();
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("{}:{}: expected 'key = value'", origin, number));
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError(fmt::format("{}:{}: unknown key '{}'", origin, number, key));
        }
        if (value.empty()) {
            throw ConfigError(fmt::format("{}:{}: empty value for '{}'", origin, number, key));
        }
        if (!c.entries_.emplace(key, value).second) {
            throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", origin, number, key));
        }
    }
    return c;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot read config file '{}'", path));
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path);
}

bool Config::has(const std::string& key) const
{
    return entries_.count(key) != 0;
}

const std::string& Config::raw(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ConfigError(fmt::format("{}: missing required key '{}'", origin_, key));
    }
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::optional<std::string>& fallback) const
{
    if (!has(key) && fallback) {
        return *fallback;
    }
    return raw(key);
}

double Config::get_double(const std::string& key, const std::optional<double>& fallback) const
{
    if (!has(key) && fallback) {
        return *fallback;
    }
    return parse_number(raw(key), key);
}

int Config::get_int(const std::string& key, const std::optional<int>& fallback) const
{
    if (!has(key) && fallback) {
        return *fallback;
    }
    const double v = parse_number(raw(key), key);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError(fmt::format("{}: '{}' is not an integer", key, raw(key)));
    }
    return static_cast<int>(v);
}

bool Config::get_bool(const std::string& key, const std::optional<bool>& fallback) const
{
    if (!has(key) && fallback) {
        return *fallback;
    }
    const std::string& v = raw(key);
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::vector<double> Config::get_list(const std::string& key) const
{
    std::vector<double> out;
    std::istringstream in(raw(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(parse_number(item, key));
    }
    return out;
}

std::string Config::canonical() const
{
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string Config::hash() const
{
    return fmt::format("{:016x}", fnv1a64(canonical()));
}

}  // namespace polpair::cli
