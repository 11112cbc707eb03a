// Acceptance checklist for the toolchain. Each item prints one PASS/FAIL
// line; the process exits nonzero if any item fails. Items that carry a
// wall-time budget fail when they exceed it.

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "generators.hpp"
#include "hybridsl/backends.hpp"
#include "hybridsl/check.hpp"
#include "hybridsl/engine.hpp"
#include "reference.hpp"
#include "test_util.hpp"

using namespace hybridsl;

namespace {

struct Failure {
  std::string reason;
};

void require(bool ok, const std::string& reason) {
  if (!ok) throw Failure{reason};
}

std::int64_t unseal_scalar(const ContextKey& key, const std::string& name,
                           const ContextVar& var) {
  if (var.values) return var.values->front();
  return unseal_value(key, name, 0, var.envelopes->front());
}

// ---------------------------------------------------------------------
// 1. Covariance agreement with an independent reference
// ---------------------------------------------------------------------
void covariance_reference_agreement() {
  Program program =
      parse(testutil::read_file(testutil::corpus_dir() / "covariance.hsl"));
  Signature sig;
  sig.variables["xVec"] = {Label::Encrypted, VarKind::Vector};
  sig.variables["yVec"] = {Label::Encrypted, VarKind::Vector};
  auto checked = check_program(program, sig);
  require(checked.ok(), "covariance program must check cleanly");

  ContextKey key = generate_key();
  std::mt19937_64 rng(40);
  std::uniform_int_distribution<std::int64_t> value(-100, 100);
  std::uniform_int_distribution<std::size_t> length(1, 16);

  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = length(rng);
    std::vector<std::int64_t> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = value(rng);
      ys[i] = value(rng);
    }
    std::int64_t want = testref::ref_covariance(xs, ys);

    Context input;
    input.variables["xVec"] = unsealed_vector(xs);
    input.variables["yVec"] = unsealed_vector(ys);

    auto clear = make_clear_algebra();
    auto fhe = make_fhe_sim_algebra(key);
    auto tee = make_tee_sim_algebra(key);
    for (ValueAlgebra* alg : {clear.get(), fhe.get(), tee.get()}) {
      EvalOutput out = evaluate(program, input, *alg);
      std::int64_t got = unseal_scalar(
          key, "covariance", out.context.variables.at("covariance"));
      require(got == want,
              std::string(alg->name()) + " covariance " + std::to_string(got) +
                  " != reference " + std::to_string(want));
    }
  }
}

// ---------------------------------------------------------------------
// 2. Backend equivalence on generated programs
// ---------------------------------------------------------------------
void backend_equivalence() {
  testgen::Rng rng(41);
  ContextKey key = generate_key();
  constexpr long long kAmpleBudget = 1'000'000'000;

  for (int trial = 0; trial < 100; ++trial) {
    auto tc = testgen::random_typed_case(rng);
    require(check_program(tc.program, derive_signature(tc.context)).ok(),
            "generated program must check cleanly");

    auto decrypt_all = [&](ValueAlgebra& alg) {
      std::map<std::string, std::vector<std::int64_t>> out;
      EvalOutput result = evaluate(tc.program, tc.context, alg);
      Context plain = result.context.key_id
                          ? unseal_context(result.context, key)
                          : result.context;
      for (const auto& [name, var] : plain.variables) {
        out[name] = *var.values;
      }
      return out;
    };

    auto clear = make_clear_algebra();
    auto fhe = make_fhe_sim_algebra(key, CostTable::defaults(), kAmpleBudget);
    auto tee = make_tee_sim_algebra(key);

    auto base = decrypt_all(*clear);
    require(decrypt_all(*fhe) == base,
            "fhe-sim output differs from clear on a generated program");
    require(decrypt_all(*tee) == base,
            "tee-sim output differs from clear on a generated program");
  }
}

// ---------------------------------------------------------------------
// 3. Negative corpus failure codes
// ---------------------------------------------------------------------
void negative_corpus_codes() {
  auto names = testutil::negative_corpus();
  require(names.size() >= 10, "negative corpus must hold at least 10 programs");

  for (const std::string& name : names) {
    std::string expected = testutil::expected_code(name);
    std::string source =
        testutil::read_file(testutil::corpus_dir() / "neg" / (name + ".hsl"));

    if (expected == "PARSE_ERROR" || expected == "LEX_ERROR") {
      try {
        parse(source);
        throw Failure{name + ": expected " + expected + ", parsed cleanly"};
      } catch (const LexError&) {
        require(expected == "LEX_ERROR", name + ": lex error, expected " + expected);
      } catch (const ParseError&) {
        require(expected == "PARSE_ERROR",
                name + ": parse error, expected " + expected);
      }
      continue;
    }

    Signature sig = load_signature(testutil::read_file(
        testutil::corpus_dir() / "neg" / (name + ".ctx.json")));
    auto result = check_program(parse(source), sig);
    require(!result.ok(), name + ": expected a violation, got none");
    for (const auto& violation : result.violations) {
      require(violation_code_name(violation.code) == expected,
              name + ": reported " +
                  std::string(violation_code_name(violation.code)) +
                  ", expected " + expected);
    }
  }
}

// ---------------------------------------------------------------------
// 4. Cost structure across backends
// ---------------------------------------------------------------------
void cost_structure() {
  Program program =
      parse(testutil::read_file(testutil::corpus_dir() / "covariance.hsl"));
  Context input;
  input.variables["xVec"] = unsealed_vector({1, 2, 3});
  input.variables["yVec"] = unsealed_vector({2, 4, 6});
  ContextKey key = generate_key();

  auto clear = make_clear_algebra();
  auto fhe = make_fhe_sim_algebra(key);
  auto tee = make_tee_sim_algebra(key);

  OpReport clear_report = evaluate(program, input, *clear).report;
  OpReport fhe_report = evaluate(program, input, *fhe).report;
  OpReport tee_report = evaluate(program, input, *tee).report;

  require(fhe_report.total_cost > clear_report.total_cost,
          "fhe-sim cost " + std::to_string(fhe_report.total_cost) +
              " not greater than clear cost " +
              std::to_string(clear_report.total_cost));
  require(tee_report.counts == clear_report.counts,
          "tee-sim op counts differ from clear");
}

// ---------------------------------------------------------------------
// 5. Noise exhaustion boundary
// ---------------------------------------------------------------------
void noise_chain_boundary() {
  auto chain_program = [](int k) {
    std::string src = "m0 = x * x\n";
    for (int i = 1; i < k; ++i) {
      src += "m" + std::to_string(i) + " = m" + std::to_string(i - 1) + " * x\n";
    }
    return parse(src);
  };
  Context input;
  input.variables["x"] = unsealed_scalar(1);
  ContextKey key = generate_key();

  auto ten = make_fhe_sim_algebra(key);
  EvalOutput out = evaluate(chain_program(10), input, *ten);
  require(out.context.variables.count("m9") == 1,
          "ten multiplications must succeed");

  auto eleven = make_fhe_sim_algebra(key);
  try {
    evaluate(chain_program(11), input, *eleven);
    throw Failure{"eleven multiplications must exhaust the noise budget"};
  } catch (const EvalError& e) {
    require(e.code() == RuntimeErrorCode::NoiseExhausted,
            std::string("expected NOISE_EXHAUSTED, got ") +
                std::string(runtime_error_code_name(e.code())));
  }
}

// ---------------------------------------------------------------------
// 6. Sealing authentication
// ---------------------------------------------------------------------
void sealing_authentication() {
  std::mt19937_64 rng(42);
  ContextKey key = generate_key();

  for (int trial = 0; trial < 1000; ++trial) {
    std::string name = "v" + std::to_string(rng() % 50);
    std::uint32_t index = static_cast<std::uint32_t>(rng() % 64);
    auto value = static_cast<std::int64_t>(rng());
    Envelope env = seal_value(key, name, index, value);
    require(unseal_value(key, name, index, env) == value,
            "round trip returned a different value");
  }

  Envelope env = seal_value(key, "balance", 7, 123456789);
  std::uniform_int_distribution<std::size_t> bit(0, kEnvelopeSize * 8 - 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t b = bit(rng);
    Envelope bad = env;
    bad[b / 8] ^= static_cast<unsigned char>(1u << (b % 8));
    try {
      unseal_value(key, "balance", 7, bad);
      throw Failure{"bit flip at position " + std::to_string(b) +
                    " went unnoticed"};
    } catch (const AuthFailure&) {
    }
  }

  try {
    unseal_value(key, "balance2", 7, env);
    throw Failure{"name swap went unnoticed"};
  } catch (const AuthFailure&) {
  }
  try {
    unseal_value(key, "balance", 8, env);
    throw Failure{"index swap went unnoticed"};
  } catch (const AuthFailure&) {
  }
}

// ---------------------------------------------------------------------
// 7. Round-trip identities
// ---------------------------------------------------------------------
void round_trip_identities() {
  for (const std::string& name : testutil::corpus_programs()) {
    std::string source =
        testutil::read_file(testutil::corpus_dir() / (name + ".hsl"));
    Program program = parse(source);
    require(parse(pretty_print(program)) == program,
            name + ": print/parse round trip changed the program");
  }

  testgen::Rng rng(43);
  for (int trial = 0; trial < 500; ++trial) {
    Program program = testgen::random_ast(rng);
    require(parse(pretty_print(program)) == program,
            "generated AST changed under print/parse round trip");
  }

  ContextKey key = generate_key();
  for (int trial = 0; trial < 200; ++trial) {
    Context context = testgen::random_context(rng, trial % 2 ? &key : nullptr);
    std::string text = save_context(context);
    require(load_context(text) == context,
            "context changed under save/load round trip");
    require(save_context(load_context(text)) == text,
            "canonical context serialization is not idempotent");
  }
}

// ---------------------------------------------------------------------
// 8. Label inference convergence
// ---------------------------------------------------------------------
void label_inference_convergence() {
  for (const std::string& name : testutil::corpus_programs()) {
    Program program =
        parse(testutil::read_file(testutil::corpus_dir() / (name + ".hsl")));
    Signature sig = load_signature(testutil::read_file(
        testutil::corpus_dir() / (name + ".ctx.json")));
    auto result = check_program(program, sig);
    require(result.ok(), name + ": corpus program must check cleanly");
    require(result.max_loop_passes <= 2,
            name + ": inference took " +
                std::to_string(result.max_loop_passes) + " passes");
  }

  Program covariance =
      parse(testutil::read_file(testutil::corpus_dir() / "covariance.hsl"));
  Signature sig;
  sig.variables["xVec"] = {Label::Encrypted, VarKind::Vector};
  sig.variables["yVec"] = {Label::Encrypted, VarKind::Vector};
  auto result = check_program(covariance, sig);
  for (const char* name :
       {"xSum", "ySum", "xMean", "yMean", "sum", "covariance"}) {
    require(result.labels.count(name) == 1,
            std::string(name) + " missing from the inferred labels");
    require(result.labels.at(name).label == Label::Encrypted,
            std::string(name) + " must be inferred encrypted");
  }
}

struct Criterion {
  int number;
  const char* title;
  std::function<void()> body;
  std::optional<double> time_limit_s;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "covariance matches a cleartext reference on all backends",
       covariance_reference_agreement, 5.0},
      {2, "decrypted outputs agree across backends on generated programs",
       backend_equivalence, 60.0},
      {3, "negative corpus produces the documented failure codes",
       negative_corpus_codes, std::nullopt},
      {4, "fhe-sim cost exceeds clear while tee-sim counts match clear",
       cost_structure, std::nullopt},
      {5, "noise survives ten chained multiplications and fails at eleven",
       noise_chain_boundary, std::nullopt},
      {6, "sealed values round-trip; tampering and rebinding are rejected",
       sealing_authentication, 10.0},
      {7, "programs and contexts round-trip through their serialized forms",
       round_trip_identities, std::nullopt},
      {8, "label inference converges in two passes and encrypts derived values",
       label_inference_convergence, std::nullopt},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string reason;
    try {
      c.body();
    } catch (const Failure& f) {
      reason = f.reason;
    } catch (const std::exception& e) {
      reason = std::string("unexpected error: ") + e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (reason.empty() && c.time_limit_s && elapsed > *c.time_limit_s) {
      reason = "took " + std::to_string(elapsed) + "s, budget " +
               std::to_string(*c.time_limit_s) + "s";
    }
    if (reason.empty()) {
      std::printf("PASS %d %s (%.2fs)\n", c.number, c.title, elapsed);
    } else {
      std::printf("FAIL %d %s (%.2fs): %s\n", c.number, c.title, elapsed,
                  reason.c_str());
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
