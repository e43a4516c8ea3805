#include "lnspdc/manifest.hpp"

#include "lnspdc/config.hpp"
#include "lnspdc/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace lnspdc {

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw NumericError("cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw NumericError("short write to '" + tmp + "'");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw NumericError("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NumericError("cannot open '" + path + "' for hashing");
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const auto got = in.gcount();
        if (got > 0) h = fnv1a64(buf, static_cast<std::size_t>(got), h);
    }
    return h;
}

void RunManifest::add_output(const std::string& path) {
    outputs.emplace_back(path, to_hex(hash_file(path)));
}

std::string RunManifest::to_json() const {
    nlohmann::json j{{"tool_version", tool_version},
                     {"command", command},
                     {"config_hash", config_hash},
                     {"started_utc", started_utc},
                     {"finished_utc", finished_utc}};
    j["outputs"] = nlohmann::json::array();
    for (const auto& [path, hash] : outputs)
        j["outputs"].push_back({{"path", path}, {"hash", hash}});
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
    atomic_write_file(path, to_json());
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace lnspdc
