#pragma once

#include <random>

#include "hybridsl/context.hpp"
#include "hybridsl/syntax.hpp"

namespace testgen {

using Rng = std::mt19937_64;

// Structurally random AST drawing from the whole grammar; suitable for
// print/parse round trips, not for checking or execution.
hybridsl::Program random_ast(Rng& rng);

// Program plus input context built to pass the checker and run on every
// backend: divisors are nonzero clear expressions, indices stay in bounds,
// range bounds are clear, and all vectors share one length.
struct TypedCase {
  hybridsl::Program program;
  hybridsl::Context context;
};

TypedCase random_typed_case(Rng& rng);

// Random but valid context document contents. Encrypted variables are a mix
// of clear-authored payloads and envelopes sealed under `seal_key` (when
// given).
hybridsl::Context random_context(Rng& rng,
                                 const hybridsl::ContextKey* seal_key);

}  // namespace testgen
