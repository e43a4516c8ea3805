#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lnspdc {

// Sectioned key-value text:
//
//   # comment
//   [section]
//   key = value
//   list = 1.0 2.0 3.0
//
// UTF-8, '#' comments, blank lines ignored. Duplicate keys within a section
// are an error. The same format carries material tables, solver configs and
// tool configs.
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text, const std::string& origin = "<string>");

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    // Typed getters throw ConfigError naming section, key and origin.
    std::string get_str(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;

    std::string get_str(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    std::vector<std::string> sections() const;
    std::vector<std::string> keys(const std::string& section) const;

    // Unknown section or key anywhere in the file is a hard error; missing
    // entries are fine (commands apply their own defaults).
    void validate_schema(const std::map<std::string, std::set<std::string>>& schema) const;

    // Canonical form: sections and keys sorted, single "key = value" lines.
    // Hash is FNV-1a 64 over the canonical form, so it is stable under key
    // reordering and comment changes.
    std::string canonical_text() const;
    std::uint64_t hash() const;

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> data_;
};

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 1469598103934665603ull);
std::string to_hex(std::uint64_t value);

} // namespace lnspdc
