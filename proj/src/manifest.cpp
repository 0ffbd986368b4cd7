#include "geoflow/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace geoflow {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void write_manifest(const std::string& out_dir, const nlohmann::json& resolved_config,
                    const std::vector<std::string>& outputs) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  nlohmann::json m;
  m["tool"] = "geoflow";
  m["version"] = "0.1.0";
  m["config"] = resolved_config;
  m["input_hash"] = "fnv1a64:" + fnv1a64_hex(resolved_config.dump());
  m["outputs"] = outputs;
  const auto now = std::chrono::system_clock::now();
  m["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  std::ofstream out(fs::path(out_dir) / "manifest.json");
  out << m.dump(2) << "\n";
}

}  // namespace geoflow
