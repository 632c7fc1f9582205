#include "sdr/report/run_manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sdr {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("run_manifest: cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const auto n = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ull;
    }
  }
  return hash;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void save_run_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["command"] = manifest.command;
  j["arguments"] = manifest.arguments;
  j["config"] = manifest.config;
  j["seeds"] = manifest.seeds;
  j["input_digests"] = manifest.input_digests;
  j["outputs"] = manifest.outputs;
  j["elapsed_seconds"] = manifest.elapsed_seconds;
  std::ofstream out(dir / "run_manifest.json", std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("run_manifest: write failed in " + dir.string());
}

RunManifest load_run_manifest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("run_manifest: cannot open " + file.string());
  nlohmann::json j;
  in >> j;
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.arguments = j.at("arguments").get<std::vector<std::string>>();
  m.config = j.at("config").get<std::map<std::string, std::string>>();
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.elapsed_seconds = j.at("elapsed_seconds").get<double>();
  return m;
}

}  // namespace sdr
