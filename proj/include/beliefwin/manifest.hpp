#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace beliefwin {

inline constexpr const char* kToolName = "beliefwin";
inline constexpr const char* kToolVersion = "1.0.0";

/// FNV-1a 64 over raw bytes; binds strategies and reports to the exact spec
/// file they were produced from.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& bytes);

/// UTC timestamp "YYYY-MM-DDTHH:MM:SSZ".  Honours SOURCE_DATE_EPOCH so runs
/// can be made byte-stable.
std::string utc_timestamp();

/// Provenance block embedded in every produced artifact.
struct RunManifest {
  std::string spec_path;
  std::string spec_hash;  // "fnv1a64:<16 hex digits>"
  std::string tool = kToolName;
  std::string tool_version = kToolVersion;
  std::string mode;       // "belief" or "perfect"
  std::map<std::string, std::uint64_t> seeds;
  std::string generated_at;

  static RunManifest for_spec(const std::string& path,
                              const std::string& spec_bytes);
};

}  // namespace beliefwin
