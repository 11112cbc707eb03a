#include <cstring>

#include <sodium.h>

#include "hybridsl/context.hpp"
#include "sodium_detail.hpp"

namespace hybridsl {

namespace {

static_assert(kKeyBytes == crypto_aead_chacha20poly1305_ietf_KEYBYTES);
static_assert(kNonceBytes == crypto_aead_chacha20poly1305_ietf_NPUBBYTES);
static_assert(kTagBytes == crypto_aead_chacha20poly1305_ietf_ABYTES);

// version byte, variable name, 4-byte big-endian element index
std::vector<unsigned char> associated_data(std::string_view name,
                                           std::uint32_t index) {
  std::vector<unsigned char> ad;
  ad.reserve(1 + name.size() + 4);
  ad.push_back(static_cast<unsigned char>(kContextVersion));
  ad.insert(ad.end(), name.begin(), name.end());
  for (int shift = 24; shift >= 0; shift -= 8) {
    ad.push_back(static_cast<unsigned char>(index >> shift));
  }
  return ad;
}

}  // namespace

Envelope seal_value(const ContextKey& key, std::string_view name,
                    std::uint32_t index, std::int64_t value) {
  detail::ensure_sodium();
  unsigned char payload[kPayloadBytes];
  auto word = static_cast<std::uint64_t>(value);
  for (std::size_t i = 0; i < kPayloadBytes; ++i) {
    payload[i] = static_cast<unsigned char>(word >> (8 * i));
  }
  Envelope envelope{};
  randombytes_buf(envelope.data(), kNonceBytes);
  std::vector<unsigned char> ad = associated_data(name, index);
  unsigned long long clen = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(
      envelope.data() + kNonceBytes, &clen, payload, sizeof payload, ad.data(),
      ad.size(), nullptr, envelope.data(), key.bytes.data());
  return envelope;
}

std::int64_t unseal_value(const ContextKey& key, std::string_view name,
                          std::uint32_t index, const Envelope& envelope) {
  detail::ensure_sodium();
  unsigned char payload[kPayloadBytes];
  unsigned long long mlen = 0;
  std::vector<unsigned char> ad = associated_data(name, index);
  int rc = crypto_aead_chacha20poly1305_ietf_decrypt(
      payload, &mlen, nullptr, envelope.data() + kNonceBytes,
      kEnvelopeSize - kNonceBytes, ad.data(), ad.size(), envelope.data(),
      key.bytes.data());
  if (rc != 0 || mlen != kPayloadBytes) {
    throw AuthFailure("envelope authentication failed for variable '" +
                      std::string(name) + "' element " +
                      std::to_string(index));
  }
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < kPayloadBytes; ++i) {
    word |= static_cast<std::uint64_t>(payload[i]) << (8 * i);
  }
  return static_cast<std::int64_t>(word);
}

std::string envelope_to_base64(const Envelope& envelope) {
  char out[sodium_base64_ENCODED_LEN(kEnvelopeSize,
                                     sodium_base64_VARIANT_ORIGINAL)];
  sodium_bin2base64(out, sizeof out, envelope.data(), envelope.size(),
                    sodium_base64_VARIANT_ORIGINAL);
  return std::string(out);
}

Envelope envelope_from_base64(const std::string& text) {
  Envelope envelope{};
  std::size_t len = 0;
  if (sodium_base642bin(envelope.data(), envelope.size(), text.data(),
                        text.size(), nullptr, &len, nullptr,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      len != kEnvelopeSize) {
    throw FormatError("", "envelope must be base64 of " +
                              std::to_string(kEnvelopeSize) + " bytes");
  }
  return envelope;
}

Context seal_context(const Context& context, const ContextKey& key) {
  KeyId id = key.id();
  if (context.key_id && *context.key_id != id) {
    throw AuthFailure("context is sealed under key " +
                      key_id_to_hex(*context.key_id) + ", not " +
                      key_id_to_hex(id));
  }
  Context out = context;
  out.key_id = id;
  for (auto& [name, var] : out.variables) {
    if (var.label != Label::Encrypted || !var.values) continue;
    std::vector<Envelope> envelopes;
    envelopes.reserve(var.values->size());
    for (std::size_t i = 0; i < var.values->size(); ++i) {
      envelopes.push_back(
          seal_value(key, name, static_cast<std::uint32_t>(i), (*var.values)[i]));
    }
    var.envelopes = std::move(envelopes);
    var.values.reset();
  }
  return out;
}

Context unseal_context(const Context& context, const ContextKey& key) {
  Context out = context;
  out.key_id.reset();
  for (auto& [name, var] : out.variables) {
    if (!var.envelopes) continue;
    std::vector<std::int64_t> values;
    values.reserve(var.envelopes->size());
    for (std::size_t i = 0; i < var.envelopes->size(); ++i) {
      values.push_back(unseal_value(key, name, static_cast<std::uint32_t>(i),
                                    (*var.envelopes)[i]));
    }
    var.values = std::move(values);
    var.envelopes.reset();
  }
  return out;
}

}  // namespace hybridsl
