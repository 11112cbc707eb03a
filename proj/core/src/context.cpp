#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hybridsl/context.hpp"

namespace hybridsl {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// nlohmann's DOM parser silently keeps the last of duplicated keys, so
// duplicates are caught in a SAX pre-pass that also surfaces syntax errors.
class DuplicateKeyScan : public nlohmann::json_sax<json> {
 public:
  bool null() override { return true; }
  bool boolean(bool) override { return true; }
  bool number_integer(number_integer_t) override { return true; }
  bool number_unsigned(number_unsigned_t) override { return true; }
  bool number_float(number_float_t, const string_t&) override { return true; }
  bool string(string_t&) override { return true; }
  bool binary(binary_t&) override { return true; }

  bool start_object(std::size_t) override {
    seen_.emplace_back();
    path_.push_back(current_key_);
    return true;
  }

  bool key(string_t& k) override {
    current_key_ = k;
    if (!seen_.back().insert(k).second) {
      std::string path;
      for (const auto& part : path_) {
        if (part.empty()) continue;
        path += part;
        path += '.';
      }
      throw FormatError(path + k, "duplicate key");
    }
    return true;
  }

  bool end_object() override {
    seen_.pop_back();
    path_.pop_back();
    current_key_.clear();
    return true;
  }

  bool start_array(std::size_t) override { return true; }
  bool end_array() override { return true; }

  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    throw FormatError("", std::string("invalid JSON: ") + ex.what());
  }

 private:
  std::vector<std::set<std::string>> seen_;
  std::vector<std::string> path_;
  std::string current_key_;
};

json parse_document(const std::string& text) {
  DuplicateKeyScan scan;
  json::sax_parse(text, &scan);
  json doc = json::parse(text);
  if (!doc.is_object()) {
    throw FormatError("", "top level must be an object");
  }
  return doc;
}

std::int64_t require_int(const json& node, const std::string& path) {
  if (node.is_number_unsigned()) {
    auto u = node.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(
                std::numeric_limits<std::int64_t>::max())) {
      throw FormatError(path, "integer out of 64-bit signed range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (!node.is_number_integer()) {
    throw FormatError(path, "expected an integer");
  }
  return node.get<std::int64_t>();
}

void check_fields(const json& node, const std::string& prefix,
                  std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : node.items()) {
    bool ok = false;
    for (const char* name : allowed) {
      if (key == name) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw FormatError(prefix.empty() ? key : prefix + "." + key,
                        "unknown field");
    }
  }
}

// Shared top-level validation; returns the variables object.
const json& validate_header(const json& doc, int& version,
                            std::optional<KeyId>& key_id) {
  check_fields(doc, "", {"version", "key_id", "variables"});
  if (!doc.contains("version")) {
    throw FormatError("version", "missing field");
  }
  if (!doc["version"].is_number_integer()) {
    throw FormatError("version", "expected an integer");
  }
  version = doc["version"].get<int>();
  if (version != kContextVersion) {
    throw FormatError("version",
                      "unsupported version " + std::to_string(version));
  }
  if (doc.contains("key_id")) {
    if (!doc["key_id"].is_string()) {
      throw FormatError("key_id", "expected a hex string");
    }
    try {
      key_id = key_id_from_hex(doc["key_id"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw FormatError("key_id", e.what());
    }
  }
  if (!doc.contains("variables") || !doc["variables"].is_object()) {
    throw FormatError("variables", "missing variables object");
  }
  return doc["variables"];
}

void validate_name(const std::string& name) {
  if (!is_identifier(name)) {
    throw FormatError("variables." + name,
                      "variable name must be a non-keyword identifier");
  }
}

Label parse_label(const json& node, const std::string& prefix) {
  if (!node.contains("label") || !node["label"].is_string()) {
    throw FormatError(prefix + ".label",
                      "expected \"clear\" or \"encrypted\"");
  }
  auto text = node["label"].get<std::string>();
  if (text == "clear") return Label::Clear;
  if (text == "encrypted") return Label::Encrypted;
  throw FormatError(prefix + ".label", "expected \"clear\" or \"encrypted\"");
}

VarKind parse_kind(const json& node, const std::string& prefix) {
  if (!node.contains("kind") || !node["kind"].is_string()) {
    throw FormatError(prefix + ".kind", "expected \"scalar\" or \"vector\"");
  }
  auto text = node["kind"].get<std::string>();
  if (text == "scalar") return VarKind::Scalar;
  if (text == "vector") return VarKind::Vector;
  throw FormatError(prefix + ".kind", "expected \"scalar\" or \"vector\"");
}

std::vector<std::int64_t> parse_values(const json& node, VarKind kind,
                                       const std::string& path) {
  if (kind == VarKind::Scalar) {
    return {require_int(node, path)};
  }
  if (!node.is_array()) {
    throw FormatError(path, "vector value must be an array of integers");
  }
  std::vector<std::int64_t> out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(require_int(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Envelope parse_envelope(const json& node, const std::string& path) {
  if (!node.is_string()) {
    throw FormatError(path, "envelope must be a base64 string");
  }
  try {
    return envelope_from_base64(node.get<std::string>());
  } catch (const FormatError& e) {
    throw FormatError(path, e.reason());
  }
}

std::vector<Envelope> parse_envelopes(const json& node, VarKind kind,
                                      const std::string& path) {
  if (kind == VarKind::Scalar) {
    return {parse_envelope(node, path)};
  }
  if (!node.is_array()) {
    throw FormatError(path, "vector envelopes must be an array");
  }
  std::vector<Envelope> out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(
        parse_envelope(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ContextVar parse_variable(const json& node, const std::string& prefix) {
  if (!node.is_object()) {
    throw FormatError(prefix, "variable must be an object");
  }
  check_fields(node, prefix,
               {"label", "kind", "value", "envelopes", "noise_budget"});
  ContextVar var;
  var.label = parse_label(node, prefix);
  var.kind = parse_kind(node, prefix);
  bool has_value = node.contains("value");
  bool has_envelopes = node.contains("envelopes");
  if (var.label == Label::Clear) {
    if (has_envelopes) {
      throw FormatError(prefix + ".envelopes",
                        "clear variables carry plain values");
    }
    if (node.contains("noise_budget")) {
      throw FormatError(prefix + ".noise_budget",
                        "noise_budget applies to encrypted variables only");
    }
    if (!has_value) {
      throw FormatError(prefix + ".value", "missing field");
    }
  } else {
    if (has_value == has_envelopes) {
      throw FormatError(prefix,
                        "encrypted variables carry either value or envelopes");
    }
    if (node.contains("noise_budget")) {
      long long budget =
          require_int(node["noise_budget"], prefix + ".noise_budget");
      if (budget < 0) {
        throw FormatError(prefix + ".noise_budget", "must be non-negative");
      }
      var.noise_budget = budget;
    }
  }
  if (has_value) {
    var.values = parse_values(node["value"], var.kind, prefix + ".value");
  } else {
    var.envelopes =
        parse_envelopes(node["envelopes"], var.kind, prefix + ".envelopes");
  }
  return var;
}

}  // namespace

std::size_t ContextVar::size() const {
  if (values) return values->size();
  if (envelopes) return envelopes->size();
  return 0;
}

ContextVar clear_scalar(std::int64_t value) {
  ContextVar var;
  var.values = std::vector<std::int64_t>{value};
  return var;
}

ContextVar clear_vector(std::vector<std::int64_t> values) {
  ContextVar var;
  var.kind = VarKind::Vector;
  var.values = std::move(values);
  return var;
}

ContextVar unsealed_scalar(std::int64_t value) {
  ContextVar var = clear_scalar(value);
  var.label = Label::Encrypted;
  return var;
}

ContextVar unsealed_vector(std::vector<std::int64_t> values) {
  ContextVar var = clear_vector(std::move(values));
  var.label = Label::Encrypted;
  return var;
}

Context load_context(const std::string& text) {
  json doc = parse_document(text);
  Context context;
  const json& variables = validate_header(doc, context.version, context.key_id);
  for (const auto& [name, node] : variables.items()) {
    validate_name(name);
    context.variables[name] = parse_variable(node, "variables." + name);
  }
  return context;
}

std::string save_context(const Context& context) {
  ordered_json doc;
  doc["version"] = context.version;
  if (context.key_id) {
    doc["key_id"] = key_id_to_hex(*context.key_id);
  }
  ordered_json variables = ordered_json::object();
  for (const auto& [name, var] : context.variables) {
    ordered_json node;
    node["label"] = var.label == Label::Clear ? "clear" : "encrypted";
    node["kind"] = var.kind == VarKind::Scalar ? "scalar" : "vector";
    if (var.values) {
      if (var.kind == VarKind::Scalar) {
        node["value"] = var.values->front();
      } else {
        node["value"] = *var.values;
      }
    } else if (var.envelopes) {
      if (var.kind == VarKind::Scalar) {
        node["envelopes"] = envelope_to_base64(var.envelopes->front());
      } else {
        ordered_json list = ordered_json::array();
        for (const Envelope& envelope : *var.envelopes) {
          list.push_back(envelope_to_base64(envelope));
        }
        node["envelopes"] = std::move(list);
      }
    }
    if (var.label == Label::Encrypted && var.noise_budget) {
      node["noise_budget"] = *var.noise_budget;
    }
    variables[name] = std::move(node);
  }
  doc["variables"] = std::move(variables);
  return doc.dump() + "\n";
}

Context load_context_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("", "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_context(buf.str());
}

void save_context_file(const Context& context,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << save_context(context);
  if (!out.flush()) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

Signature derive_signature(const Context& context) {
  Signature signature;
  for (const auto& [name, var] : context.variables) {
    signature.variables[name] = SigVar{var.label, var.kind};
  }
  return signature;
}

Signature load_signature(const std::string& text) {
  json doc = parse_document(text);
  int version = 0;
  std::optional<KeyId> key_id;
  const json& variables = validate_header(doc, version, key_id);
  Signature signature;
  for (const auto& [name, node] : variables.items()) {
    validate_name(name);
    std::string prefix = "variables." + name;
    if (!node.is_object()) {
      throw FormatError(prefix, "variable must be an object");
    }
    check_fields(node, prefix,
                 {"label", "kind", "value", "envelopes", "noise_budget"});
    bool payload_free = !node.contains("value") &&
                        !node.contains("envelopes") &&
                        !node.contains("noise_budget");
    ContextVar var;
    if (payload_free) {
      var.label = parse_label(node, prefix);
      var.kind = parse_kind(node, prefix);
    } else {
      var = parse_variable(node, prefix);
    }
    signature.variables[name] = SigVar{var.label, var.kind};
  }
  return signature;
}

}  // namespace hybridsl
