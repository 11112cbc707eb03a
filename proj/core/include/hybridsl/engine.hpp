#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hybridsl/value.hpp"

namespace hybridsl {

// Backend contract. Ops take scalar values; when one operand is clear and
// the other encrypted, the implementation promotes the clear side through
// its own clear-operand pathway and records the appropriate category.
class ValueAlgebra {
 public:
  virtual ~ValueAlgebra() = default;

  virtual std::string_view name() const = 0;

  virtual Value add(const Value& a, const Value& b) = 0;
  virtual Value sub(const Value& a, const Value& b) = 0;
  virtual Value mul(const Value& a, const Value& b) = 0;
  virtual Value div(const Value& a, const Value& divisor) = 0;
  virtual Value neg(const Value& a) = 0;
  virtual Value cmp(BinOp op, const Value& a, const Value& b) = 0;
  virtual Value mux(const Value& cond, const Value& a, const Value& b) = 0;
  virtual Value encrypt_clear(std::int64_t value) = 0;

  virtual Value import_var(const std::string& name, const ContextVar& var) = 0;
  virtual ContextVar export_var(const std::string& name,
                                const Value& value) = 0;

  // Key under which exported envelopes are sealed, if this backend seals.
  virtual std::optional<KeyId> key_id() const = 0;

  virtual const OpReport& report() const = 0;
  virtual void reset_report() = 0;
};

struct EvalOutput {
  Context context;
  OpReport report;
};

// Runs the program over the input context. Assumes the program passed
// check() against the context's signature; violations that slip through
// surface as runtime errors.
EvalOutput evaluate(const Program& program, const Context& input,
                    ValueAlgebra& backend);

std::string op_report_to_json(std::string_view backend_name,
                              const OpReport& report);

struct BackendSpec {
  std::string name;
  std::function<std::unique_ptr<ValueAlgebra>()> make;
};

struct BenchRow {
  std::string backend;
  int repetitions = 0;
  std::chrono::nanoseconds mean_wall{0};
  std::chrono::nanoseconds min_wall{0};
  std::map<std::string, long long> counts;
  long long total_cost = 0;
};

class MismatchError : public std::runtime_error {
 public:
  MismatchError(std::string variable, std::string detail);
  const std::string& variable() const { return variable_; }

 private:
  std::string variable_;
};

// Evaluates the program `repetitions` times per backend and aggregates wall
// times and op counts. All backends must agree on every decrypted output
// variable; `key` decrypts sealed outputs for that comparison (may be null
// when no backend seals).
std::vector<BenchRow> run_bench(const Program& program, const Context& input,
                                const std::vector<BackendSpec>& backends,
                                int repetitions, const ContextKey* key);

std::string bench_rows_to_json(const std::vector<BenchRow>& rows);
std::string bench_rows_to_table(const std::vector<BenchRow>& rows);

}  // namespace hybridsl
