#include "hybridsl/value.hpp"

namespace hybridsl {

Label value_label(const Value& value) {
  switch (value.index()) {
    case 0:
    case 1:
    case 2:
      return Label::Clear;
    default:
      return Label::Encrypted;
  }
}

std::string_view runtime_error_code_name(RuntimeErrorCode code) {
  switch (code) {
    case RuntimeErrorCode::DivByZero: return "DIV_BY_ZERO";
    case RuntimeErrorCode::EmptyRangeNegative: return "EMPTY_RANGE_NEGATIVE";
    case RuntimeErrorCode::IndexOutOfBounds: return "INDEX_OUT_OF_BOUNDS";
    case RuntimeErrorCode::Capability: return "CAPABILITY";
    case RuntimeErrorCode::NoiseExhausted: return "NOISE_EXHAUSTED";
    case RuntimeErrorCode::KeyMismatch: return "KEY_MISMATCH";
  }
  return "?";
}

namespace {

std::string render_eval_error(RuntimeErrorCode code, SourceLoc loc,
                              const std::string& message) {
  std::string out(runtime_error_code_name(code));
  out += ' ';
  out += std::to_string(loc.line);
  out += ':';
  out += std::to_string(loc.col);
  out += ' ';
  out += message;
  return out;
}

}  // namespace

EvalError::EvalError(RuntimeErrorCode code, SourceLoc loc, std::string message)
    : std::runtime_error(render_eval_error(code, loc, message)),
      code_(code),
      loc_(loc),
      message_(std::move(message)) {}

}  // namespace hybridsl
