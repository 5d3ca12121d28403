#include "banditlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace banditlab {

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw IoError("failed to format double");
    return std::string(buffer, ptr);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    return fnv1a64(read_text_file(path));
}

std::string to_hex(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(value));
    return buffer;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return buffer.str();
}

std::string manifest_to_json(const RunManifest& manifest) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["tool_version"] = manifest.tool_version;
    j["master_seed"] = manifest.master_seed;
    j["duration_seconds"] = manifest.duration_seconds;
    j["config"] = nlohmann::json::object();
    for (const auto& [key, value] : manifest.config) j["config"][key] = value;
    j["outputs"] = nlohmann::json::array();
    for (const RunManifest::Output& output : manifest.outputs) {
        j["outputs"].push_back({{"name", output.name},
                                {"bytes", output.bytes},
                                {"checksum", output.checksum}});
    }
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& json_text) {
    RunManifest manifest;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
        manifest.command = j.at("command").get<std::string>();
        manifest.tool_version = j.at("tool_version").get<std::string>();
        manifest.master_seed = j.at("master_seed").get<std::uint64_t>();
        manifest.duration_seconds = j.at("duration_seconds").get<double>();
        for (const auto& [key, value] : j.at("config").items())
            manifest.config.emplace_back(key, value.get<std::string>());
        for (const auto& entry : j.at("outputs")) {
            manifest.outputs.push_back({entry.at("name").get<std::string>(),
                                        entry.at("bytes").get<std::uint64_t>(),
                                        entry.at("checksum").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed manifest: ") + e.what());
    }
    return manifest;
}

void emit_output(RunManifest& manifest, const std::string& dir,
                 const std::string& name, const std::string& content) {
    std::filesystem::path path = std::filesystem::path(dir) / name;
    std::filesystem::create_directories(path.parent_path());
    write_text_file(path.string(), content);
    manifest.outputs.push_back({name, content.size(), to_hex(fnv1a64(content))});
}

}  // namespace banditlab
