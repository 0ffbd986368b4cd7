#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace geoflow {

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

/// Writes <out_dir>/manifest.json echoing the resolved configuration, a
/// content hash of the inputs, and the produced files. The timestamp lives
/// only here; result files stay byte-reproducible.
void write_manifest(const std::string& out_dir, const nlohmann::json& resolved_config,
                    const std::vector<std::string>& outputs);

}  // namespace geoflow
