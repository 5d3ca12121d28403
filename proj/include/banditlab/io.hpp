#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace banditlab {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t value);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Per-run provenance: config echo, seed, and a checksum per emitted file.
struct RunManifest {
    std::string command;
    std::string tool_version;
    std::uint64_t master_seed = 0;
    double duration_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> config;  // key, value
    struct Output {
        std::string name;
        std::uint64_t bytes = 0;
        std::string checksum;  // fnv1a64, hex
    };
    std::vector<Output> outputs;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& json_text);

// Writes `content` into dir/name and records it in the manifest.
void emit_output(RunManifest& manifest, const std::string& dir,
                 const std::string& name, const std::string& content);

}  // namespace banditlab
