#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hybridsl/context.hpp"
#include "hybridsl/syntax.hpp"

namespace hybridsl {

struct ClearInt {
  std::int64_t value = 0;
  bool operator==(const ClearInt&) const = default;
};

struct ClearBool {
  bool value = false;
  bool operator==(const ClearBool&) const = default;
};

struct ClearVec {
  std::vector<std::int64_t> values;
  bool operator==(const ClearVec&) const = default;
};

// Simulated ciphertext: the payload stands in for an encrypted scalar and
// never leaves the process in clear (serialization seals it).
struct SimCipher {
  std::int64_t payload = 0;
  long long noise_budget = 0;
  KeyId key_id = 0;
  bool operator==(const SimCipher&) const = default;
};

struct CipherVec {
  std::vector<SimCipher> elements;
  bool operator==(const CipherVec&) const = default;
};

// Encrypted boolean: a 0/1 ciphertext usable only as a selection condition.
struct CipherBool {
  SimCipher bit;
  bool operator==(const CipherBool&) const = default;
};

using Value =
    std::variant<ClearInt, ClearBool, ClearVec, SimCipher, CipherVec,
                 CipherBool>;

Label value_label(const Value& value);

enum class RuntimeErrorCode {
  DivByZero,
  EmptyRangeNegative,
  IndexOutOfBounds,
  Capability,
  NoiseExhausted,
  KeyMismatch,
};

std::string_view runtime_error_code_name(RuntimeErrorCode code);

class EvalError : public std::runtime_error {
 public:
  EvalError(RuntimeErrorCode code, SourceLoc loc, std::string message);

  RuntimeErrorCode code() const { return code_; }
  SourceLoc loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  RuntimeErrorCode code_;
  SourceLoc loc_;
  std::string message_;
};

// Per-operation counters plus the abstract cost accumulated under the
// backend's cost table and the wall time of one evaluation.
struct OpReport {
  std::map<std::string, long long> counts;
  long long total_cost = 0;
  std::chrono::nanoseconds duration{0};
};

}  // namespace hybridsl
