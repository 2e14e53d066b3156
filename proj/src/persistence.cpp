// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/persistence.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "vset/error.hpp"
#include "vset/io_util.hpp"

static_assert(std::endian::native == std::endian::little,
              "artifact I/O assumes a little-endian host");

namespace vset {

namespace {

constexpr char kMagic[8] = {'V', 'S', 'E', 'T', 'A', 'R', 'T', '1'};

template <typename T>
void append_le(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T read_le(std::string_view data, std::size_t& offset) {
  if (offset + sizeof(T) > data.size()) {
    throw Error(Errc::kIntegrityError, "truncated artifact header");
  }
  T value;
  std::memcpy(&value, data.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

std::string read_bytes(std::string_view data, std::size_t& offset,
                       std::size_t len, const char* what) {
  if (offset + len > data.size()) {
    throw Error(Errc::kIntegrityError,
                std::string("truncated artifact ") + what);
  }
  std::string out(data.substr(offset, len));
  offset += len;
  return out;
}

}  // namespace

void write_artifact(const std::filesystem::path& path, const std::string& kind,
                    const nlohmann::json& metadata, std::string_view payload) {
  std::string out;
  out.reserve(64 + payload.size());
  out.append(kMagic, sizeof(kMagic));
  append_le<std::uint32_t>(out, kArtifactVersion);
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(kind.size()));
  out += kind;
  const std::string meta = metadata.dump();
  append_le<std::uint64_t>(out, meta.size());
  out += meta;
  append_le<std::uint64_t>(out, payload.size());
  out += payload;

  const std::string hash_hex = sha256_hex(payload);
  // hex -> raw 32 bytes
  for (std::size_t i = 0; i < hash_hex.size(); i += 2) {
    out += static_cast<char>(
        std::stoi(hash_hex.substr(i, 2), nullptr, 16));
  }
  write_file_atomic(path, out);
}

namespace {

struct ParsedHeader {
  std::uint32_t version;
  std::string kind;
  nlohmann::json metadata;
  std::size_t payload_offset;
  std::uint64_t payload_len;
};

ParsedHeader parse_header(std::string_view data,
                          const std::filesystem::path& path) {
  std::size_t off = 0;
  const std::string magic = read_bytes(data, off, sizeof(kMagic), "magic");
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(Errc::kIntegrityError, path.string() + ": bad magic");
  }
  ParsedHeader h;
  h.version = read_le<std::uint32_t>(data, off);
  if (h.version != kArtifactVersion) {
    throw Error(Errc::kVersionError,
                path.string() + ": file version " +
                    std::to_string(h.version) + ", reader version " +
                    std::to_string(kArtifactVersion));
  }
  const auto kind_len = read_le<std::uint32_t>(data, off);
  h.kind = read_bytes(data, off, kind_len, "kind");
  const auto meta_len = read_le<std::uint64_t>(data, off);
  const std::string meta = read_bytes(data, off, meta_len, "metadata");
  h.metadata = nlohmann::json::parse(meta, nullptr, false);
  if (h.metadata.is_discarded()) {
    throw Error(Errc::kIntegrityError, path.string() + ": bad metadata JSON");
  }
  h.payload_len = read_le<std::uint64_t>(data, off);
  h.payload_offset = off;
  return h;
}

}  // namespace

Artifact read_artifact(const std::filesystem::path& path,
                       const std::string& expected_kind) {
  const std::string data = read_text_file(path);
  ParsedHeader h = parse_header(data, path);
  if (h.kind != expected_kind) {
    throw Error(Errc::kKindMismatch, path.string() + ": contains '" + h.kind +
                                         "', expected '" + expected_kind +
                                         "'");
  }
  std::size_t off = h.payload_offset;
  Artifact art;
  art.kind = h.kind;
  art.metadata = std::move(h.metadata);
  art.payload = read_bytes(data, off, h.payload_len, "payload");
  const std::string stored = read_bytes(data, off, 32, "hash");
  const std::string actual_hex = sha256_hex(art.payload);
  std::string stored_hex = to_hex(
      reinterpret_cast<const unsigned char*>(stored.data()), stored.size());
  if (actual_hex != stored_hex) {
    throw Error(Errc::kIntegrityError,
                path.string() + ": payload hash mismatch");
  }
  return art;
}

nlohmann::json inspect_artifact(const std::filesystem::path& path) {
  const std::string data = read_text_file(path);
  ParsedHeader h = parse_header(data, path);
  return nlohmann::json{{"kind", h.kind},
                        {"version", h.version},
                        {"payload_bytes", h.payload_len},
                        {"metadata", h.metadata}};
}

std::string doubles_to_bytes(std::span<const double> values) {
  std::string out(values.size() * sizeof(double), '\0');
  if (!values.empty()) {
    std::memcpy(out.data(), values.data(), out.size());
  }
  return out;
}

void bytes_to_doubles(std::string_view bytes, std::span<double> out) {
  if (bytes.size() != out.size() * sizeof(double)) {
    throw Error(Errc::kIntegrityError, "payload size does not match shape");
  }
  if (!out.empty()) {
    std::memcpy(out.data(), bytes.data(), bytes.size());
  }
}

}  // namespace vset
