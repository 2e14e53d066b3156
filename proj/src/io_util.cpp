// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/io_util.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "vset/error.hpp"
#include "vset/log.hpp"

namespace vset {

namespace log {
namespace {
bool g_json = false;
std::mutex g_mutex;

void emit(const char* level, std::string_view msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_json) {
    std::string escaped;
    escaped.reserve(msg.size());
    for (char c : msg) {
      switch (c) {
        case '"': escaped += "\\\""; break;
        case '\\': escaped += "\\\\"; break;
        case '\n': escaped += "\\n"; break;
        case '\t': escaped += "\\t"; break;
        default: escaped += c;
      }
    }
    std::cerr << "{\"level\":\"" << level << "\",\"msg\":\"" << escaped
              << "\"}\n";
  } else {
    std::cerr << "[" << level << "] " << msg << "\n";
  }
}
}  // namespace

void set_json(bool enabled) { g_json = enabled; }
void info(std::string_view msg) { emit("info", msg); }
void warn(std::string_view msg) { emit("warn", msg); }
void error(std::string_view msg) { emit("error", msg); }
}  // namespace log

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::kMalformedDocument: return "MalformedDocument";
    case Errc::kMissingExpansion: return "MissingExpansion";
    case Errc::kMissingTitle: return "MissingTitle";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kBadHeader: return "BadHeader";
    case Errc::kBadRecord: return "BadRecord";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kDuplicateKey: return "DuplicateKey";
    case Errc::kMissingEmbedding: return "MissingEmbedding";
    case Errc::kMissingTitleEmbedding: return "MissingTitleEmbedding";
    case Errc::kEmptyRetrieval: return "EmptyRetrieval";
    case Errc::kEmptyPools: return "EmptyPools";
    case Errc::kInvalidRatios: return "InvalidRatios";
    case Errc::kInvalidDims: return "InvalidDims";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kEmptySplit: return "EmptySplit";
    case Errc::kNonFiniteLoss: return "NonFiniteLoss";
    case Errc::kDegenerateLabels: return "DegenerateLabels";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kUnknownOid: return "UnknownOid";
    case Errc::kMissingManifestRow: return "MissingManifestRow";
    case Errc::kInfeasibleTarget: return "InfeasibleTarget";
    case Errc::kIoError: return "IoError";
    case Errc::kIntegrityError: return "IntegrityError";
    case Errc::kVersionError: return "VersionError";
    case Errc::kKindMismatch: return "KindMismatch";
    case Errc::kConfigError: return "ConfigError";
  }
  return "Error";
}

int errc_exit_code(Errc c) {
  switch (c) {
    case Errc::kInvalidConfig:
    case Errc::kInvalidRatios:
    case Errc::kConfigError:
      return 1;
    case Errc::kShapeMismatch:
    case Errc::kNonFiniteLoss:
    case Errc::kInvalidDims:
      return 3;
    default:
      return 2;
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  auto dir = path.parent_path();
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::kIoError, "cannot write " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error(Errc::kIoError, "short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(line);
  }
  return lines;
}

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(std::string_view data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                      (static_cast<unsigned char>(data[i + 1]) << 8) |
                      static_cast<unsigned char>(data[i + 2]);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += kB64Alphabet[v & 63];
    i += 3;
  }
  std::size_t rem = data.size() - i;
  if (rem == 1) {
    std::uint32_t v = static_cast<unsigned char>(data[i]) << 16;
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (rem == 2) {
    std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                      (static_cast<unsigned char>(data[i + 1]) << 8);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::string base64_decode(std::string_view data) {
  if (data.size() % 4 != 0) {
    throw Error(Errc::kBadRecord, "base64 length not a multiple of 4");
  }
  std::string out;
  out.reserve(data.size() / 4 * 3);
  for (std::size_t i = 0; i < data.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (int j = 0; j < 4; ++j) {
      char c = data[i + j];
      if (c == '=') {
        ++pad;
        v <<= 6;
      } else {
        int x = b64_value(c);
        if (x < 0 || pad > 0) {
          throw Error(Errc::kBadRecord, "invalid base64 character");
        }
        v = (v << 6) | static_cast<std::uint32_t>(x);
      }
    }
    out += static_cast<char>((v >> 16) & 0xFF);
    if (pad < 2) out += static_cast<char>((v >> 8) & 0xFF);
    if (pad < 1) out += static_cast<char>(v & 0xFF);
  }
  return out;
}

std::string csv_escape(std::string_view field) {
  bool needs_quote = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quote) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string to_hex(const unsigned char* data, std::size_t len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out += digits[data[i] >> 4];
    out += digits[data[i] & 0xF];
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, 32> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  return to_hex(digest.data(), len);
}

std::string sha256_file_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::kIoError, "cannot open " + path.string());
  }
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    std::streamsize got = in.gcount();
    if (got > 0) {
      EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
    }
  }
  std::array<unsigned char, 32> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  return to_hex(digest.data(), len);
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

}  // namespace vset
