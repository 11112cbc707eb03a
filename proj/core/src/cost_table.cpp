#include <nlohmann/json.hpp>

#include "hybridsl/backends.hpp"

namespace hybridsl {

CostTable CostTable::defaults() {
  CostTable table;
  table.entries = {
      {"clear_add", {1, 0}},     {"clear_sub", {1, 0}},
      {"clear_mul", {1, 0}},     {"clear_div", {1, 0}},
      {"clear_neg", {1, 0}},     {"clear_cmp", {1, 0}},
      {"clear_mux", {1, 0}},     {"enc_add", {1, 1}},
      {"enc_sub", {1, 1}},       {"enc_mul", {10, 10}},
      {"enc_mul_clear", {2, 2}}, {"enc_div_clear", {2, 2}},
      {"enc_neg", {1, 1}},       {"enc_cmp", {15, 15}},
      {"mux", {12, 12}},
  };
  return table;
}

const OpCost& CostTable::at(std::string_view op) const {
  auto it = entries.find(std::string(op));
  if (it == entries.end()) {
    throw std::logic_error("no cost entry for op '" + std::string(op) + "'");
  }
  return it->second;
}

CostTable cost_table_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw FormatError("", "cost table must be an object");
  }
  CostTable table = CostTable::defaults();
  for (const auto& [op, node] : doc.items()) {
    auto it = table.entries.find(op);
    if (it == table.entries.end()) {
      throw FormatError(op, "unknown operation");
    }
    if (!node.is_object()) {
      throw FormatError(op, "expected {\"cost\": N, \"noise\": N}");
    }
    for (const auto& [field, value] : node.items()) {
      if (field != "cost" && field != "noise") {
        throw FormatError(op + "." + field, "unknown field");
      }
      if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw FormatError(op + "." + field, "expected a non-negative integer");
      }
    }
    if (node.contains("cost")) it->second.cost = node["cost"].get<long long>();
    if (node.contains("noise")) {
      it->second.noise = node["noise"].get<long long>();
    }
  }
  return table;
}

long long replay_cost(const OpReport& report, const CostTable& table) {
  long long total = 0;
  for (const auto& [op, count] : report.counts) {
    total += table.at(op).cost * count;
  }
  return total;
}

}  // namespace hybridsl
