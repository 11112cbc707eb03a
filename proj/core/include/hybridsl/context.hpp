#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridsl/check.hpp"

namespace hybridsl {

inline constexpr int kContextVersion = 1;
inline constexpr std::size_t kKeyBytes = 32;
inline constexpr std::size_t kNonceBytes = 12;
inline constexpr std::size_t kTagBytes = 16;
inline constexpr std::size_t kPayloadBytes = 8;
inline constexpr std::size_t kEnvelopeSize =
    kNonceBytes + kPayloadBytes + kTagBytes;

using Envelope = std::array<unsigned char, kEnvelopeSize>;

// First 8 bytes of a BLAKE2b hash of the key, in little-endian order.
// Identifies which key sealed a context without revealing the key.
using KeyId = std::uint64_t;

std::string key_id_to_hex(KeyId id);
KeyId key_id_from_hex(const std::string& hex);  // throws std::invalid_argument

struct ContextKey {
  std::array<unsigned char, kKeyBytes> bytes{};

  KeyId id() const;
  bool operator==(const ContextKey&) const = default;
};

ContextKey generate_key();

// Key files hold the 32 key bytes as 64 lowercase hex characters plus a
// trailing newline.
std::string key_to_text(const ContextKey& key);
ContextKey key_from_text(const std::string& text);  // throws FormatError
ContextKey load_key_file(const std::filesystem::path& path);
void save_key_file(const ContextKey& key, const std::filesystem::path& path);

// Raised when an envelope fails authentication: tampered bytes, wrong key,
// or mismatched name/index binding.
class AuthFailure : public std::runtime_error {
 public:
  explicit AuthFailure(const std::string& what) : std::runtime_error(what) {}
};

// Structural problem in a context/key document. `path` points into the
// document ("variables.xVec.value"), not at a file.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string path, std::string reason);
  const std::string& path() const { return path_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

Envelope seal_value(const ContextKey& key, std::string_view name,
                    std::uint32_t index, std::int64_t value);
std::int64_t unseal_value(const ContextKey& key, std::string_view name,
                          std::uint32_t index, const Envelope& envelope);

std::string envelope_to_base64(const Envelope& envelope);
Envelope envelope_from_base64(const std::string& text);  // throws FormatError

// One variable slot. Clear variables carry `values`; sealed encrypted
// variables carry `envelopes`. An encrypted variable may instead carry
// `values` when authored in clear and not yet sealed (the seal command
// converts it). Scalars hold exactly one element.
struct ContextVar {
  Label label = Label::Clear;
  VarKind kind = VarKind::Scalar;
  std::optional<std::vector<std::int64_t>> values;
  std::optional<std::vector<Envelope>> envelopes;
  std::optional<long long> noise_budget;

  std::size_t size() const;
  bool operator==(const ContextVar&) const = default;
};

ContextVar clear_scalar(std::int64_t value);
ContextVar clear_vector(std::vector<std::int64_t> values);
// Encrypted label with a clear payload, awaiting sealing.
ContextVar unsealed_scalar(std::int64_t value);
ContextVar unsealed_vector(std::vector<std::int64_t> values);

struct Context {
  int version = kContextVersion;
  std::optional<KeyId> key_id;
  std::map<std::string, ContextVar> variables;

  bool operator==(const Context&) const = default;
};

// Parses and validates the JSON wire format. Rejects unknown fields,
// duplicate names, and payloads inconsistent with label/kind.
Context load_context(const std::string& text);  // throws FormatError

// Canonical serialization: sorted names, fixed field order, compact body,
// one trailing newline. load_context(save_context(c)) == c.
std::string save_context(const Context& context);

Context load_context_file(const std::filesystem::path& path);
void save_context_file(const Context& context,
                       const std::filesystem::path& path);

Signature derive_signature(const Context& context);

// Accepts either a full context document or one whose variables carry only
// label and kind, for checking programs without payload data. Variables
// that do carry payload fields are validated in full.
Signature load_signature(const std::string& text);  // throws FormatError

// Seals every encrypted variable still carrying clear values and stamps the
// key id. Already-sealed variables must match the key.
Context seal_context(const Context& context, const ContextKey& key);

// Inverse of seal_context: envelopes back to clear values for inspection.
Context unseal_context(const Context& context, const ContextKey& key);

}  // namespace hybridsl
