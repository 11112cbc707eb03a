#pragma once

#include <memory>

#include "hybridsl/engine.hpp"

namespace hybridsl {

inline constexpr long long kDefaultFreshBudget = 100;

struct OpCost {
  long long cost = 0;
  long long noise = 0;
  bool operator==(const OpCost&) const = default;
};

// Abstract cost and noise charge per operation category. Encrypted
// categories model homomorphic overhead; clear categories cost 1 with no
// noise. Defaults can be overridden from a JSON config.
struct CostTable {
  std::map<std::string, OpCost> entries;

  static CostTable defaults();
  const OpCost& at(std::string_view op) const;
  bool operator==(const CostTable&) const = default;
};

// JSON object mapping op names to {"cost": N, "noise": N}; unspecified ops
// keep their defaults. Unknown names are rejected.
CostTable cost_table_from_json(const std::string& text);

long long replay_cost(const OpReport& report, const CostTable& table);

// Baseline: plain 64-bit arithmetic, no protection. Sealed inputs are
// unsealed with `unseal_key` and processed (and exported) in clear.
std::unique_ptr<ValueAlgebra> make_clear_algebra(
    CostTable table = CostTable::defaults(),
    const ContextKey* unseal_key = nullptr);

// Simulated FHE: arithmetic over SimCiphers with per-op noise charges;
// exhausting a budget raises NOISE_EXHAUSTED.
std::unique_ptr<ValueAlgebra> make_fhe_sim_algebra(
    const ContextKey& key, CostTable table = CostTable::defaults(),
    long long fresh_budget = kDefaultFreshBudget);

// Simulated TEE: encrypted values compute as plaintext inside the boundary
// at clear-op costs; envelopes are unsealed on import and resealed on
// export under `key`.
std::unique_ptr<ValueAlgebra> make_tee_sim_algebra(
    const ContextKey& key, CostTable table = CostTable::defaults());

}  // namespace hybridsl
