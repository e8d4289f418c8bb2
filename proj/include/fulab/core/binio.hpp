#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

// Binary artifact container: 16 bytes of magic+version, one length-prefixed
// UTF-8 JSON header, then raw little-endian payload sections.
namespace fulab::binio {

inline constexpr std::uint32_t kFormatVersion = 1;

inline void write_magic(std::ofstream& os, const char tag[12]) {
  char buf[12] = {};
  std::memcpy(buf, tag, std::strlen(tag) < 12 ? std::strlen(tag) : 12);
  os.write(buf, 12);
  std::uint32_t v = kFormatVersion;
  os.write(reinterpret_cast<const char*>(&v), 4);
}

inline void read_magic(std::ifstream& is, const char tag[12], const std::string& what) {
  char buf[12] = {};
  std::uint32_t v = 0;
  is.read(buf, 12);
  is.read(reinterpret_cast<char*>(&v), 4);
  char want[12] = {};
  std::memcpy(want, tag, std::strlen(tag) < 12 ? std::strlen(tag) : 12);
  if (!is || std::memcmp(buf, want, 12) != 0)
    throw std::runtime_error(what + ": bad magic");
  if (v != kFormatVersion)
    throw std::runtime_error(what + ": unsupported format version");
}

inline void write_header(std::ofstream& os, const nlohmann::ordered_json& j) {
  const std::string s = j.dump();
  const std::uint32_t len = static_cast<std::uint32_t>(s.size());
  os.write(reinterpret_cast<const char*>(&len), 4);
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline nlohmann::json read_header(std::ifstream& is, const std::string& what) {
  std::uint32_t len = 0;
  is.read(reinterpret_cast<char*>(&len), 4);
  if (!is || len > (1u << 26)) throw std::runtime_error(what + ": bad header length");
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw std::runtime_error(what + ": truncated header");
  return nlohmann::json::parse(s);
}

inline void write_f32(std::ofstream& os, const float* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * 4));
}

inline void read_f32(std::ifstream& is, float* p, std::size_t n, const std::string& what) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * 4));
  if (!is) throw std::runtime_error(what + ": truncated payload");
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return is;
}

}  // namespace fulab::binio
