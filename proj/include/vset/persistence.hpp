// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace vset {

// Versioned binary artifact container shared by all stages.
//
// Byte layout (all integers little-endian):
//   magic   "VSETART1"                    8 bytes
//   u32     format version (currently 1)
//   u32     kind length, then kind bytes
//   u64     metadata length, then metadata JSON (UTF-8)
//   u64     payload length, then payload bytes
//   32 B    SHA-256 of the payload
//
// Payload numeric data is always little-endian 64-bit floats.

inline constexpr std::uint32_t kArtifactVersion = 1;

struct Artifact {
  std::string kind;
  nlohmann::json metadata;
  std::string payload;
};

/// Atomic: written to a temp file and renamed into place.
void write_artifact(const std::filesystem::path& path, const std::string& kind,
                    const nlohmann::json& metadata, std::string_view payload);

/// Verifies magic, version, kind and payload hash before returning.
Artifact read_artifact(const std::filesystem::path& path,
                       const std::string& expected_kind);

/// Reads just the header (no payload verification); used by `inspect`.
nlohmann::json inspect_artifact(const std::filesystem::path& path);

std::string doubles_to_bytes(std::span<const double> values);
void bytes_to_doubles(std::string_view bytes, std::span<double> out);

}  // namespace vset
