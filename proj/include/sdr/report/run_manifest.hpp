#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sdr {

// Provenance record dropped next to every command's outputs: what ran, with
// which resolved configuration and seeds, over which inputs (content
// digests), producing which files.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;              // argv tail as invoked
  std::map<std::string, std::string> config;       // resolved "section.key" -> value
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::string> input_digests;  // path -> fnv1a64 hex
  std::vector<std::string> outputs;                // paths relative to the manifest
  double elapsed_seconds = 0.0;
};

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);  // 16 lowercase hex digits

// run_manifest.json inside dir.
void save_run_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest load_run_manifest(const std::filesystem::path& file);

}  // namespace sdr
