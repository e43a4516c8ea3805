#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lnspdc {

// Writes to <path>.tmp.<pid> in the same directory, then renames. Partial
// outputs are never left at the final path.
void atomic_write_file(const std::string& path, const std::string& content);

std::uint64_t hash_file(const std::string& path);

// Run record emitted next to every command's artifacts. Data artifacts are
// byte-stable across reruns; only the manifest timestamps differ.
struct RunManifest {
    std::string tool_version;
    std::string command;
    std::string config_hash; // stable under key reordering
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::pair<std::string, std::string>> outputs; // path, content hash

    void add_output(const std::string& path);
    std::string to_json() const;
    void write(const std::string& path) const; // atomic; adds itself last
};

std::string utc_timestamp_now();

} // namespace lnspdc
