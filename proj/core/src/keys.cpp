#include <fstream>
#include <sstream>

#include <sodium.h>

#include "hybridsl/context.hpp"
#include "sodium_detail.hpp"

namespace hybridsl {

namespace detail {

void ensure_sodium() {
  if (sodium_init() < 0) {
    throw std::runtime_error("libsodium initialization failed");
  }
}

}  // namespace detail

FormatError::FormatError(std::string path, std::string reason)
    : std::runtime_error(path.empty() ? reason : path + ": " + reason),
      path_(std::move(path)),
      reason_(std::move(reason)) {}

std::string key_id_to_hex(KeyId id) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (std::size_t i = 0; i < 8; ++i) {
    unsigned byte = static_cast<unsigned>(id >> (8 * i)) & 0xffu;
    out[2 * i] = digits[byte >> 4];
    out[2 * i + 1] = digits[byte & 0xfu];
  }
  return out;
}

KeyId key_id_from_hex(const std::string& hex) {
  if (hex.size() != 16) {
    throw std::invalid_argument("key id must be 16 hex characters");
  }
  KeyId id = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    unsigned byte = 0;
    for (std::size_t j = 0; j < 2; ++j) {
      char c = hex[2 * i + j];
      unsigned digit;
      if (c >= '0' && c <= '9') {
        digit = static_cast<unsigned>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        digit = static_cast<unsigned>(c - 'a') + 10;
      } else if (c >= 'A' && c <= 'F') {
        digit = static_cast<unsigned>(c - 'A') + 10;
      } else {
        throw std::invalid_argument("key id must be 16 hex characters");
      }
      byte = byte << 4 | digit;
    }
    id |= static_cast<KeyId>(byte) << (8 * i);
  }
  return id;
}

KeyId ContextKey::id() const {
  detail::ensure_sodium();
  unsigned char digest[crypto_generichash_BYTES];
  crypto_generichash(digest, sizeof digest, bytes.data(), bytes.size(),
                     nullptr, 0);
  KeyId id = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    id |= static_cast<KeyId>(digest[i]) << (8 * i);
  }
  return id;
}

ContextKey generate_key() {
  detail::ensure_sodium();
  ContextKey key;
  randombytes_buf(key.bytes.data(), key.bytes.size());
  return key;
}

std::string key_to_text(const ContextKey& key) {
  char hex[2 * kKeyBytes + 1];
  sodium_bin2hex(hex, sizeof hex, key.bytes.data(), key.bytes.size());
  return std::string(hex) + "\n";
}

ContextKey key_from_text(const std::string& text) {
  std::string trimmed = text;
  while (!trimmed.empty() &&
         (trimmed.back() == '\n' || trimmed.back() == '\r' ||
          trimmed.back() == ' ' || trimmed.back() == '\t')) {
    trimmed.pop_back();
  }
  ContextKey key;
  if (trimmed.size() != 2 * kKeyBytes ||
      sodium_hex2bin(key.bytes.data(), key.bytes.size(), trimmed.data(),
                     trimmed.size(), nullptr, nullptr, nullptr) != 0) {
    throw FormatError("", "key must be 64 hex characters");
  }
  return key;
}

ContextKey load_key_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("", "cannot read key file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return key_from_text(buf.str());
}

void save_key_file(const ContextKey& key, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write key file " + path.string());
  }
  out << key_to_text(key);
  if (!out.flush()) {
    throw std::runtime_error("cannot write key file " + path.string());
  }
}

}  // namespace hybridsl
