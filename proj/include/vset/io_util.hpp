// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vset {

std::string read_text_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory followed by rename, so
// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string base64_encode(std::string_view data);
std::string base64_decode(std::string_view data);  // throws on bad input

// Minimal CSV quoting: fields containing comma, quote or newline are quoted.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split_line(std::string_view line);

std::string to_hex(const unsigned char* data, std::size_t len);

// SHA-256 digest, hex-encoded.
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

// Shortest round-trip decimal formatting for doubles.
std::string format_double(double v);

// 64-bit FNV-1a; stable across platforms, used for feature hashing and
// seed derivation.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace vset
