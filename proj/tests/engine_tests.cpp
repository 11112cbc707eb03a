#include <string>

#include "doctest.h"
#include "generators.hpp"
#include "hybridsl/backends.hpp"
#include "hybridsl/engine.hpp"
#include "nlohmann/json.hpp"
#include "test_util.hpp"

using namespace hybridsl;

namespace {

Context covariance_input(std::vector<std::int64_t> xs,
                         std::vector<std::int64_t> ys) {
  Context c;
  c.variables["xVec"] = unsealed_vector(std::move(xs));
  c.variables["yVec"] = unsealed_vector(std::move(ys));
  return c;
}

Program corpus_program(const std::string& name) {
  return parse(testutil::read_file(testutil::corpus_dir() / (name + ".hsl")));
}

std::int64_t scalar_of(const Context& ctx, const std::string& name) {
  const ContextVar& var = ctx.variables.at(name);
  REQUIRE(var.values.has_value());
  REQUIRE(var.values->size() == 1);
  return var.values->front();
}

// Decrypted view of an output context: envelopes are unsealed when a key is
// given, clear payloads pass through.
std::map<std::string, std::vector<std::int64_t>> decrypted(
    const Context& ctx, const ContextKey* key) {
  Context plain = key ? unseal_context(ctx, *key) : ctx;
  std::map<std::string, std::vector<std::int64_t>> out;
  for (const auto& [name, var] : plain.variables) {
    REQUIRE(var.values.has_value());
    out[name] = *var.values;
  }
  return out;
}

// Delegates to the clear backend but reports exports one higher than
// computed, to prove the bench harness notices disagreement.
class SkewedAlgebra : public ValueAlgebra {
 public:
  SkewedAlgebra() : inner_(make_clear_algebra()) {}
  std::string_view name() const override { return "skewed"; }
  Value add(const Value& a, const Value& b) override { return inner_->add(a, b); }
  Value sub(const Value& a, const Value& b) override { return inner_->sub(a, b); }
  Value mul(const Value& a, const Value& b) override { return inner_->mul(a, b); }
  Value div(const Value& a, const Value& b) override { return inner_->div(a, b); }
  Value neg(const Value& a) override { return inner_->neg(a); }
  Value cmp(BinOp op, const Value& a, const Value& b) override {
    return inner_->cmp(op, a, b);
  }
  Value mux(const Value& c, const Value& a, const Value& b) override {
    return inner_->mux(c, a, b);
  }
  Value encrypt_clear(std::int64_t v) override { return inner_->encrypt_clear(v); }
  Value import_var(const std::string& n, const ContextVar& v) override {
    return inner_->import_var(n, v);
  }
  ContextVar export_var(const std::string& n, const Value& v) override {
    ContextVar out = inner_->export_var(n, v);
    if (out.values) {
      for (auto& value : *out.values) value += 1;
    }
    return out;
  }
  std::optional<KeyId> key_id() const override { return inner_->key_id(); }
  const OpReport& report() const override { return inner_->report(); }
  void reset_report() override { inner_->reset_report(); }

 private:
  std::unique_ptr<ValueAlgebra> inner_;
};

}  // namespace

TEST_CASE("covariance of the worked example is one on every backend") {
  Program program = corpus_program("covariance");
  ContextKey key = generate_key();
  Context input = covariance_input({1, 2, 3}, {2, 4, 6});

  SUBCASE("clear") {
    auto alg = make_clear_algebra();
    EvalOutput out = evaluate(program, input, *alg);
    CHECK(scalar_of(out.context, "covariance") == 1);
    CHECK_FALSE(out.context.key_id.has_value());
    CHECK(out.report.counts ==
          std::map<std::string, long long>{{"clear_add", 9},
                                           {"clear_div", 3},
                                           {"clear_mul", 3},
                                           {"clear_sub", 6}});
    CHECK(out.report.total_cost == 21);
  }
  SUBCASE("fhe-sim") {
    auto alg = make_fhe_sim_algebra(key);
    EvalOutput out = evaluate(program, input, *alg);
    CHECK(out.context.key_id == key.id());
    const ContextVar& cov = out.context.variables.at("covariance");
    CHECK(cov.label == Label::Encrypted);
    CHECK(cov.noise_budget == 79);
    CHECK(unseal_value(key, "covariance", 0, cov.envelopes->front()) == 1);
    CHECK(out.report.counts ==
          std::map<std::string, long long>{{"enc_add", 9},
                                           {"enc_div_clear", 3},
                                           {"enc_mul", 3},
                                           {"enc_sub", 6}});
    CHECK(out.report.total_cost == 51);
  }
  SUBCASE("tee-sim") {
    auto alg = make_tee_sim_algebra(key);
    EvalOutput out = evaluate(program, input, *alg);
    CHECK(unseal_value(
              key, "covariance", 0,
              out.context.variables.at("covariance").envelopes->front()) == 1);
    CHECK(out.report.counts ==
          std::map<std::string, long long>{{"clear_add", 9},
                                           {"clear_div", 3},
                                           {"clear_mul", 3},
                                           {"clear_sub", 6}});
    CHECK(out.report.total_cost == 21);
  }
}

TEST_CASE("the output context carries every variable live at program end") {
  Context input;
  input.variables["x"] = clear_scalar(10);
  auto alg = make_clear_algebra();
  EvalOutput out = evaluate(parse("a = 1\nb = a + x\n"), input, *alg);
  CHECK(out.context.variables.size() == 3);
  CHECK(scalar_of(out.context, "x") == 10);
  CHECK(scalar_of(out.context, "a") == 1);
  CHECK(scalar_of(out.context, "b") == 11);
  CHECK(out.context.version == kContextVersion);
}

TEST_CASE("clear conditions evaluate only the taken branch") {
  Context input;
  input.variables["flag"] = clear_scalar(0);
  input.variables["z"] = clear_scalar(0);
  auto alg = make_clear_algebra();
  EvalOutput out =
      evaluate(parse("s = if flag > 0 { 1 / z } else { 7 }\n"), input, *alg);
  CHECK(scalar_of(out.context, "s") == 7);
  CHECK(out.report.counts.count("clear_mux") == 0);
  CHECK(out.report.counts.at("clear_cmp") == 1);
}

TEST_CASE("encrypted conditions evaluate both branches and select") {
  ContextKey key = generate_key();
  Context input;
  input.variables["a"] = unsealed_scalar(3);
  input.variables["b"] = unsealed_scalar(9);

  auto fhe = make_fhe_sim_algebra(key);
  EvalOutput out = evaluate(
      parse("smaller = if a < b { a } else { b }\n"), input, *fhe);
  CHECK(unseal_value(key, "smaller", 0,
                     out.context.variables.at("smaller").envelopes->front()) ==
        3);
  CHECK(out.report.counts.at("enc_cmp") == 1);
  CHECK(out.report.counts.at("mux") == 1);

  SUBCASE("a dividing-by-zero untaken branch still fires") {
    Context bad;
    bad.variables["a"] = unsealed_scalar(3);
    bad.variables["b"] = unsealed_scalar(9);
    bad.variables["z"] = clear_scalar(0);
    auto fhe2 = make_fhe_sim_algebra(key);
    CHECK_THROWS_AS(
        evaluate(parse("s = if a < b { a } else { a / z }\n"), bad, *fhe2),
        EvalError);
  }
}

TEST_CASE("runtime errors carry code, position, and message") {
  Context input;
  input.variables["z"] = clear_scalar(0);
  input.variables["v"] = clear_vector({1, 2});
  auto alg = make_clear_algebra();

  struct Case {
    const char* src;
    RuntimeErrorCode code;
    SourceLoc loc;
  };
  const Case cases[] = {
      {"s = 10 / z\n", RuntimeErrorCode::DivByZero, {1, 8}},
      {"s = v[5]\n", RuntimeErrorCode::IndexOutOfBounds, {1, 7}},
      {"for i in range(0 - 3) {\n  s = 1\n}\n",
       RuntimeErrorCode::EmptyRangeNegative,
       {1, 10}},
      {"for i in range(99999999) {\n  s = 1\n}\n",
       RuntimeErrorCode::Capability,
       {1, 10}},
      {"s = if 3 { 1 } else { 2 }\n", RuntimeErrorCode::Capability, {1, 8}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.src);
    try {
      evaluate(parse(c.src), input, *alg);
      FAIL("expected EvalError");
    } catch (const EvalError& e) {
      CHECK(e.code() == c.code);
      CHECK(e.loc() == c.loc);
      CHECK(std::string(e.what()).find(runtime_error_code_name(c.code).data()) !=
            std::string::npos);
    }
  }
}

TEST_CASE("an empty range body never runs") {
  Context input;
  input.variables["z"] = clear_scalar(0);
  auto alg = make_clear_algebra();
  EvalOutput out = evaluate(
      parse("s = 5\nfor i in range(0) {\n  s = 1 / z\n}\n"), input, *alg);
  CHECK(scalar_of(out.context, "s") == 5);
}

TEST_CASE("loop binders shadow and restore outer bindings at runtime") {
  Context input;
  input.variables["v"] = clear_vector({10, 20});
  auto alg = make_clear_algebra();
  EvalOutput out = evaluate(
      parse("x = 5\ns = 0\nfor x in v {\n  s = s + x\n}\ny = x\n"), input,
      *alg);
  CHECK(scalar_of(out.context, "s") == 30);
  CHECK(scalar_of(out.context, "y") == 5);
  CHECK(out.context.variables.count("x") == 1);
}

TEST_CASE("vector iteration visits elements in order") {
  Context input;
  input.variables["v"] = clear_vector({3, 1, 2});
  auto alg = make_clear_algebra();
  EvalOutput out = evaluate(
      parse("s = 0\nfor e in v {\n  s = s * 10 + e\n}\n"), input, *alg);
  CHECK(scalar_of(out.context, "s") == 312);
}

TEST_CASE("booleans export as zero or one") {
  Context input;
  input.variables["a"] = clear_scalar(4);
  auto alg = make_clear_algebra();
  EvalOutput out = evaluate(parse("t = a > 1\nf = a < 1\n"), input, *alg);
  CHECK(scalar_of(out.context, "t") == 1);
  CHECK(scalar_of(out.context, "f") == 0);
}

TEST_CASE("indexing demands a clear index at runtime") {
  ContextKey key = generate_key();
  Context input;
  input.variables["v"] = clear_vector({1, 2});
  input.variables["e"] = unsealed_scalar(1);
  auto fhe = make_fhe_sim_algebra(key);
  try {
    evaluate(parse("s = v[e]\n"), input, *fhe);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.code() == RuntimeErrorCode::Capability);
  }
}

TEST_CASE("generated programs agree across backends after decryption") {
  testgen::Rng rng(2024);
  ContextKey key = generate_key();
  constexpr long long kAmpleBudget = 1'000'000'000;
  for (int i = 0; i < 40; ++i) {
    auto tc = testgen::random_typed_case(rng);
    REQUIRE(check_program(tc.program, derive_signature(tc.context)).ok());
    CAPTURE(pretty_print(tc.program));
    CAPTURE(save_context(tc.context));

    auto clear = make_clear_algebra();
    auto fhe = make_fhe_sim_algebra(key, CostTable::defaults(), kAmpleBudget);
    auto tee = make_tee_sim_algebra(key);

    auto base = decrypted(evaluate(tc.program, tc.context, *clear).context,
                          nullptr);
    CHECK(decrypted(evaluate(tc.program, tc.context, *fhe).context, &key) ==
          base);
    CHECK(decrypted(evaluate(tc.program, tc.context, *tee).context, &key) ==
          base);
  }
}

TEST_CASE("evaluation reports serialize to one JSON line") {
  Context input;
  input.variables["a"] = clear_scalar(2);
  auto alg = make_clear_algebra();
  EvalOutput out = evaluate(parse("b = a * a\n"), input, *alg);

  std::string text = op_report_to_json(alg->name(), out.report);
  CHECK(text.back() == '\n');
  CHECK(text.find('\n') == text.size() - 1);

  auto doc = nlohmann::json::parse(text);
  CHECK(doc.at("backend") == "clear");
  CHECK(doc.at("counts").at("clear_mul") == 1);
  CHECK(doc.at("total_cost") == 1);
  CHECK(doc.at("wall_ns").get<long long>() >= 0);
}

TEST_CASE("bench runs every backend and checks agreement") {
  Program program = corpus_program("covariance");
  Context input = covariance_input({1, 2, 3}, {2, 4, 6});
  ContextKey key = generate_key();

  std::vector<BackendSpec> specs;
  specs.push_back({"clear", [] { return make_clear_algebra(); }});
  specs.push_back({"fhe-sim", [&] { return make_fhe_sim_algebra(key); }});
  specs.push_back({"tee-sim", [&] { return make_tee_sim_algebra(key); }});

  auto rows = run_bench(program, input, specs, 3, &key);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].backend == "clear");
  CHECK(rows[1].backend == "fhe-sim");
  CHECK(rows[2].backend == "tee-sim");
  for (const auto& row : rows) {
    CHECK(row.repetitions == 3);
    CHECK(row.mean_wall >= row.min_wall);
    CHECK(row.min_wall.count() >= 0);
  }
  CHECK(rows[1].total_cost == 51);
  CHECK(rows[0].total_cost == 21);
  CHECK(rows[2].counts == rows[0].counts);

  SUBCASE("rows serialize to JSON and a table") {
    auto doc = nlohmann::json::parse(bench_rows_to_json(rows));
    REQUIRE(doc.is_array());
    CHECK(doc.size() == 3);
    CHECK(doc[1].at("backend") == "fhe-sim");
    CHECK(doc[1].at("total_cost") == 51);
    CHECK(doc[1].at("counts").at("enc_mul") == 3);

    std::string table = bench_rows_to_table(rows);
    CHECK(table.find("backend") != std::string::npos);
    CHECK(table.find("fhe-sim") != std::string::npos);
    CHECK(table.find("51") != std::string::npos);
  }
}

TEST_CASE("bench validates its inputs") {
  Program program = parse("a = 1\n");
  Context input;
  std::vector<BackendSpec> specs;
  specs.push_back({"clear", [] { return make_clear_algebra(); }});

  CHECK_THROWS_AS(run_bench(program, input, specs, 0, nullptr),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_bench(program, input, {}, 1, nullptr),
                  std::invalid_argument);
}

TEST_CASE("bench surfaces backend disagreement with the variable name") {
  Program program = parse("z = 1\n");
  Context input;
  std::vector<BackendSpec> specs;
  specs.push_back({"clear", [] { return make_clear_algebra(); }});
  specs.push_back(
      {"skewed", [] { return std::make_unique<SkewedAlgebra>(); }});

  try {
    run_bench(program, input, specs, 1, nullptr);
    FAIL("expected MismatchError");
  } catch (const MismatchError& e) {
    CHECK(e.variable() == "z");
    CHECK(std::string(e.what()).find("'clear'") != std::string::npos);
    CHECK(std::string(e.what()).find("'skewed'") != std::string::npos);
  }
}

TEST_CASE("costs never shrink when inputs become encrypted") {
  for (const std::string& name : {std::string("covariance"), std::string("dot"),
                                  std::string("mixed")}) {
    CAPTURE(name);
    Program program = corpus_program(name);
    Context input = load_context_file(testutil::corpus_dir() / (name + ".ctx.json"));
    ContextKey key = generate_key();

    auto clear = make_clear_algebra();
    auto fhe = make_fhe_sim_algebra(key);
    long long clear_cost = evaluate(program, input, *clear).report.total_cost;
    long long fhe_cost = evaluate(program, input, *fhe).report.total_cost;
    CHECK(fhe_cost > clear_cost);
  }
}
