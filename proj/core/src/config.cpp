#include "lnspdc/config.hpp"

#include "lnspdc/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lnspdc {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            cfg.data_[section]; // sections may be empty
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any [section]");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        auto& sec = cfg.data_[section];
        if (sec.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + section + "]");
        sec[key] = value;
    }
    return cfg;
}

bool ConfigFile::has_section(const std::string& section) const {
    return data_.count(section) != 0;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) != 0;
}

std::string ConfigFile::get_str(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    if (it == data_.end() || !it->second.count(key))
        throw ConfigError(origin_ + ": missing key '" + key + "' in [" + section + "]");
    return it->second.at(key);
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const std::string s = get_str(section, key);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + s + "' is not a number");
    return v;
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const std::string s = get_str(section, key);
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + s + "' is not an integer");
    return v;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key) const {
    std::string s = get_str(section, key);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    throw ConfigError(origin_ + ": [" + section + "] " + key + " = '" + s + "' is not a boolean");
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key) const {
    const std::string s = get_str(section, key);
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        errno = 0;
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
            throw ConfigError(origin_ + ": [" + section + "] " + key + ": bad list element '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

std::string ConfigFile::get_str(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
    return has(section, key) ? get_str(section, key) : fallback;
}
double ConfigFile::get_double(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}
std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}
bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    return has(section, key) ? get_bool(section, key) : fallback;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
    data_[section][key] = value;
}

std::vector<std::string> ConfigFile::sections() const {
    std::vector<std::string> out;
    out.reserve(data_.size());
    for (const auto& [name, _] : data_) out.push_back(name);
    return out;
}

std::vector<std::string> ConfigFile::keys(const std::string& section) const {
    std::vector<std::string> out;
    auto it = data_.find(section);
    if (it == data_.end()) return out;
    for (const auto& [k, _] : it->second) out.push_back(k);
    return out;
}

void ConfigFile::validate_schema(const std::map<std::string, std::set<std::string>>& schema) const {
    for (const auto& [section, entries] : data_) {
        auto sit = schema.find(section);
        if (sit == schema.end())
            throw ConfigError(origin_ + ": unknown section [" + section + "]");
        for (const auto& [key, _] : entries) {
            if (!sit->second.count(key))
                throw ConfigError(origin_ + ": unknown key '" + key + "' in [" + section + "]");
        }
    }
}

std::string ConfigFile::canonical_text() const {
    std::ostringstream out;
    for (const auto& [section, entries] : data_) { // std::map iterates sorted
        out << "[" << section << "]\n";
        for (const auto& [key, value] : entries)
            out << key << " = " << value << "\n";
    }
    return out.str();
}

std::uint64_t ConfigFile::hash() const {
    const std::string canon = canonical_text();
    return fnv1a64(canon.data(), canon.size());
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[value & 0xf];
        value >>= 4;
    }
    return s;
}

} // namespace lnspdc
