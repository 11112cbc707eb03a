#include <algorithm>
#include <limits>

#include "hybridsl/backends.hpp"

namespace hybridsl {

namespace {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                   static_cast<std::uint64_t>(b));
}

std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                   static_cast<std::uint64_t>(b));
}

std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) *
                                   static_cast<std::uint64_t>(b));
}

std::int64_t wrap_neg(std::int64_t a) {
  return static_cast<std::int64_t>(-static_cast<std::uint64_t>(a));
}

std::int64_t trunc_div(std::int64_t a, std::int64_t b) {
  if (b == 0) {
    throw EvalError(RuntimeErrorCode::DivByZero, {}, "division by zero");
  }
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
    return a;
  }
  return a / b;
}

bool compare_ints(BinOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case BinOp::Eq: return a == b;
    case BinOp::Ne: return a != b;
    case BinOp::Lt: return a < b;
    case BinOp::Le: return a <= b;
    case BinOp::Gt: return a > b;
    case BinOp::Ge: return a >= b;
    default:
      throw std::logic_error("not a comparison operator");
  }
}

[[noreturn]] void capability(std::string message) {
  throw EvalError(RuntimeErrorCode::Capability, {}, std::move(message));
}

class CountingAlgebra : public ValueAlgebra {
 public:
  explicit CountingAlgebra(CostTable table) : table_(std::move(table)) {}

  const OpReport& report() const override { return report_; }

  void reset_report() override {
    report_.counts.clear();
    report_.total_cost = 0;
    report_.duration = std::chrono::nanoseconds{0};
  }

 protected:
  // Counts the op and returns its noise charge.
  long long record(std::string_view op) {
    const OpCost& cost = table_.at(op);
    ++report_.counts[std::string(op)];
    report_.total_cost += cost.cost;
    return cost.noise;
  }

  CostTable table_;
  OpReport report_;
};

class ClearAlgebra final : public CountingAlgebra {
 public:
  ClearAlgebra(CostTable table, const ContextKey* unseal_key)
      : CountingAlgebra(std::move(table)) {
    if (unseal_key) key_ = *unseal_key;
  }

  std::string_view name() const override { return "clear"; }

  Value add(const Value& a, const Value& b) override {
    std::int64_t out = wrap_add(operand(a), operand(b));
    record("clear_add");
    return ClearInt{out};
  }

  Value sub(const Value& a, const Value& b) override {
    std::int64_t out = wrap_sub(operand(a), operand(b));
    record("clear_sub");
    return ClearInt{out};
  }

  Value mul(const Value& a, const Value& b) override {
    std::int64_t out = wrap_mul(operand(a), operand(b));
    record("clear_mul");
    return ClearInt{out};
  }

  Value div(const Value& a, const Value& divisor) override {
    std::int64_t out = trunc_div(operand(a), operand(divisor));
    record("clear_div");
    return ClearInt{out};
  }

  Value neg(const Value& a) override {
    std::int64_t out = wrap_neg(operand(a));
    record("clear_neg");
    return ClearInt{out};
  }

  Value cmp(BinOp op, const Value& a, const Value& b) override {
    bool out = compare_ints(op, operand(a), operand(b));
    record("clear_cmp");
    return ClearBool{out};
  }

  Value mux(const Value& cond, const Value& a, const Value& b) override {
    const auto* flag = std::get_if<ClearBool>(&cond);
    if (!flag) capability("clear selection requires a clear boolean");
    std::int64_t out = flag->value ? operand(a) : operand(b);
    record("clear_mux");
    return ClearInt{out};
  }

  Value encrypt_clear(std::int64_t value) override { return ClearInt{value}; }

  Value import_var(const std::string& name, const ContextVar& var) override {
    std::vector<std::int64_t> values;
    if (var.values) {
      values = *var.values;
    } else if (var.envelopes) {
      if (!key_) {
        capability("sealed input '" + name + "' requires a key");
      }
      values.reserve(var.envelopes->size());
      for (std::size_t i = 0; i < var.envelopes->size(); ++i) {
        values.push_back(unseal_value(*key_, name,
                                      static_cast<std::uint32_t>(i),
                                      (*var.envelopes)[i]));
      }
    }
    if (var.kind == VarKind::Scalar) {
      return ClearInt{values.empty() ? 0 : values.front()};
    }
    return ClearVec{std::move(values)};
  }

  ContextVar export_var(const std::string& name, const Value& value) override {
    if (const auto* i = std::get_if<ClearInt>(&value)) {
      return clear_scalar(i->value);
    }
    if (const auto* b = std::get_if<ClearBool>(&value)) {
      return clear_scalar(b->value ? 1 : 0);
    }
    if (const auto* v = std::get_if<ClearVec>(&value)) {
      return clear_vector(v->values);
    }
    capability("clear backend cannot export ciphertext variable '" + name +
               "'");
  }

  std::optional<KeyId> key_id() const override { return std::nullopt; }

 private:
  std::int64_t operand(const Value& v) const {
    if (const auto* i = std::get_if<ClearInt>(&v)) return i->value;
    capability("clear backend received a non-integer operand");
  }

  std::optional<ContextKey> key_;
};

class FheSimAlgebra final : public CountingAlgebra {
 public:
  FheSimAlgebra(const ContextKey& key, CostTable table, long long fresh_budget)
      : CountingAlgebra(std::move(table)),
        key_(key),
        id_(key.id()),
        fresh_(fresh_budget) {}

  std::string_view name() const override { return "fhe-sim"; }

  Value add(const Value& a, const Value& b) override {
    return arith(a, b, "clear_add", "enc_add", wrap_add);
  }

  Value sub(const Value& a, const Value& b) override {
    return arith(a, b, "clear_sub", "enc_sub", wrap_sub);
  }

  Value mul(const Value& a, const Value& b) override {
    const auto* ca = std::get_if<SimCipher>(&a);
    const auto* cb = std::get_if<SimCipher>(&b);
    if (!ca && !cb) {
      std::int64_t out = wrap_mul(scalar_clear(a), scalar_clear(b));
      record("clear_mul");
      return ClearInt{out};
    }
    if (ca && cb) {
      check_key(*ca);
      check_key(*cb);
      std::int64_t payload = wrap_mul(ca->payload, cb->payload);
      long long budget = charge("enc_mul", std::min(ca->noise_budget,
                                                    cb->noise_budget));
      return SimCipher{payload, budget, id_};
    }
    const SimCipher& cipher = ca ? *ca : *cb;
    check_key(cipher);
    std::int64_t clear = ca ? scalar_clear(b) : scalar_clear(a);
    std::int64_t payload = wrap_mul(cipher.payload, clear);
    long long budget = charge("enc_mul_clear", cipher.noise_budget);
    return SimCipher{payload, budget, id_};
  }

  Value div(const Value& a, const Value& divisor) override {
    if (std::holds_alternative<SimCipher>(divisor) ||
        std::holds_alternative<CipherBool>(divisor)) {
      capability("encrypted divisor is not supported");
    }
    std::int64_t d = scalar_clear(divisor);
    if (const auto* ca = std::get_if<SimCipher>(&a)) {
      check_key(*ca);
      std::int64_t payload = trunc_div(ca->payload, d);
      long long budget = charge("enc_div_clear", ca->noise_budget);
      return SimCipher{payload, budget, id_};
    }
    std::int64_t out = trunc_div(scalar_clear(a), d);
    record("clear_div");
    return ClearInt{out};
  }

  Value neg(const Value& a) override {
    if (const auto* ca = std::get_if<SimCipher>(&a)) {
      check_key(*ca);
      long long budget = charge("enc_neg", ca->noise_budget);
      return SimCipher{wrap_neg(ca->payload), budget, id_};
    }
    std::int64_t out = wrap_neg(scalar_clear(a));
    record("clear_neg");
    return ClearInt{out};
  }

  Value cmp(BinOp op, const Value& a, const Value& b) override {
    if (std::holds_alternative<ClearInt>(a) &&
        std::holds_alternative<ClearInt>(b)) {
      bool out = compare_ints(op, scalar_clear(a), scalar_clear(b));
      record("clear_cmp");
      return ClearBool{out};
    }
    SimCipher ca = as_cipher(a);
    SimCipher cb = as_cipher(b);
    bool out = compare_ints(op, ca.payload, cb.payload);
    long long budget =
        charge("enc_cmp", std::min(ca.noise_budget, cb.noise_budget));
    return CipherBool{SimCipher{out ? 1 : 0, budget, id_}};
  }

  Value mux(const Value& cond, const Value& a, const Value& b) override {
    const auto* flag = std::get_if<CipherBool>(&cond);
    if (!flag) capability("selection condition must be an encrypted boolean");
    check_key(flag->bit);
    SimCipher ca = as_cipher(a);
    SimCipher cb = as_cipher(b);
    // a·c + b·(1−c) over a 0/1 condition selects exactly one side.
    std::int64_t payload = flag->bit.payload != 0 ? ca.payload : cb.payload;
    long long budget =
        charge("mux", std::min({flag->bit.noise_budget, ca.noise_budget,
                                cb.noise_budget}));
    return SimCipher{payload, budget, id_};
  }

  Value encrypt_clear(std::int64_t value) override {
    return SimCipher{value, fresh_, id_};
  }

  Value import_var(const std::string& name, const ContextVar& var) override {
    if (var.label == Label::Clear) {
      if (var.kind == VarKind::Scalar) return ClearInt{var.values->front()};
      return ClearVec{*var.values};
    }
    long long budget = var.noise_budget.value_or(fresh_);
    std::vector<SimCipher> elements;
    if (var.values) {
      elements.reserve(var.values->size());
      for (std::int64_t v : *var.values) {
        elements.push_back(SimCipher{v, budget, id_});
      }
    } else if (var.envelopes) {
      elements.reserve(var.envelopes->size());
      for (std::size_t i = 0; i < var.envelopes->size(); ++i) {
        std::int64_t v = unseal_value(key_, name,
                                      static_cast<std::uint32_t>(i),
                                      (*var.envelopes)[i]);
        elements.push_back(SimCipher{v, budget, id_});
      }
    }
    if (var.kind == VarKind::Scalar) {
      return elements.empty() ? SimCipher{0, budget, id_} : elements.front();
    }
    return CipherVec{std::move(elements)};
  }

  ContextVar export_var(const std::string& name, const Value& value) override {
    if (const auto* i = std::get_if<ClearInt>(&value)) {
      return clear_scalar(i->value);
    }
    if (const auto* b = std::get_if<ClearBool>(&value)) {
      return clear_scalar(b->value ? 1 : 0);
    }
    if (const auto* v = std::get_if<ClearVec>(&value)) {
      return clear_vector(v->values);
    }
    if (const auto* c = std::get_if<SimCipher>(&value)) {
      check_key(*c);
      return sealed_scalar(name, c->payload, c->noise_budget);
    }
    if (const auto* cb = std::get_if<CipherBool>(&value)) {
      check_key(cb->bit);
      return sealed_scalar(name, cb->bit.payload != 0 ? 1 : 0,
                           cb->bit.noise_budget);
    }
    const auto& vec = std::get<CipherVec>(value);
    ContextVar out;
    out.label = Label::Encrypted;
    out.kind = VarKind::Vector;
    std::vector<Envelope> envelopes;
    envelopes.reserve(vec.elements.size());
    long long budget = fresh_;
    for (std::size_t i = 0; i < vec.elements.size(); ++i) {
      const SimCipher& c = vec.elements[i];
      check_key(c);
      budget = std::min(budget, c.noise_budget);
      envelopes.push_back(
          seal_value(key_, name, static_cast<std::uint32_t>(i), c.payload));
    }
    out.envelopes = std::move(envelopes);
    out.noise_budget = budget;
    return out;
  }

  std::optional<KeyId> key_id() const override { return id_; }

 private:
  template <typename F>
  Value arith(const Value& a, const Value& b, const char* clear_op,
              const char* enc_op, F f) {
    if (std::holds_alternative<ClearInt>(a) &&
        std::holds_alternative<ClearInt>(b)) {
      std::int64_t out = f(scalar_clear(a), scalar_clear(b));
      record(clear_op);
      return ClearInt{out};
    }
    SimCipher ca = as_cipher(a);
    SimCipher cb = as_cipher(b);
    std::int64_t payload = f(ca.payload, cb.payload);
    long long budget =
        charge(enc_op, std::min(ca.noise_budget, cb.noise_budget));
    return SimCipher{payload, budget, id_};
  }

  std::int64_t scalar_clear(const Value& v) const {
    if (const auto* i = std::get_if<ClearInt>(&v)) return i->value;
    if (std::holds_alternative<CipherBool>(v) ||
        std::holds_alternative<ClearBool>(v)) {
      capability("boolean cannot be used in arithmetic");
    }
    capability("expected a clear integer operand");
  }

  // Promotes a clear operand to a fresh ciphertext.
  SimCipher as_cipher(const Value& v) const {
    if (const auto* c = std::get_if<SimCipher>(&v)) {
      check_key(*c);
      return *c;
    }
    if (const auto* i = std::get_if<ClearInt>(&v)) {
      return SimCipher{i->value, fresh_, id_};
    }
    if (std::holds_alternative<CipherBool>(v) ||
        std::holds_alternative<ClearBool>(v)) {
      capability("boolean cannot be used in arithmetic");
    }
    capability("expected a scalar operand");
  }

  void check_key(const SimCipher& c) const {
    if (c.key_id != id_) {
      throw EvalError(RuntimeErrorCode::KeyMismatch, {},
                      "ciphertext under key " + key_id_to_hex(c.key_id) +
                          " used with key " + key_id_to_hex(id_));
    }
  }

  long long charge(std::string_view op, long long budget) {
    long long noise = record(op);
    long long remaining = budget - noise;
    if (remaining < 0) {
      throw EvalError(RuntimeErrorCode::NoiseExhausted, {},
                      "noise budget exhausted by " + std::string(op) +
                          " (charge " + std::to_string(noise) + ", budget " +
                          std::to_string(budget) + ")");
    }
    return remaining;
  }

  ContextVar sealed_scalar(const std::string& name, std::int64_t payload,
                           long long budget) {
    ContextVar out;
    out.label = Label::Encrypted;
    out.kind = VarKind::Scalar;
    out.envelopes = std::vector<Envelope>{seal_value(key_, name, 0, payload)};
    out.noise_budget = budget;
    return out;
  }

  ContextKey key_;
  KeyId id_;
  long long fresh_;
};

class TeeSimAlgebra final : public CountingAlgebra {
 public:
  TeeSimAlgebra(const ContextKey& key, CostTable table)
      : CountingAlgebra(std::move(table)), key_(key), id_(key.id()) {}

  std::string_view name() const override { return "tee-sim"; }

  Value add(const Value& a, const Value& b) override {
    return arith(a, b, "clear_add", wrap_add);
  }

  Value sub(const Value& a, const Value& b) override {
    return arith(a, b, "clear_sub", wrap_sub);
  }

  Value mul(const Value& a, const Value& b) override {
    return arith(a, b, "clear_mul", wrap_mul);
  }

  Value div(const Value& a, const Value& divisor) override {
    Operand x = operand(a);
    Operand d = operand(divisor);
    std::int64_t out = trunc_div(x.value, d.value);
    record("clear_div");
    return wrap(out, x.enc || d.enc);
  }

  Value neg(const Value& a) override {
    Operand x = operand(a);
    std::int64_t out = wrap_neg(x.value);
    record("clear_neg");
    return wrap(out, x.enc);
  }

  Value cmp(BinOp op, const Value& a, const Value& b) override {
    Operand x = operand(a);
    Operand y = operand(b);
    bool out = compare_ints(op, x.value, y.value);
    record("clear_cmp");
    if (x.enc || y.enc) {
      return CipherBool{SimCipher{out ? 1 : 0, kDefaultFreshBudget, id_}};
    }
    return ClearBool{out};
  }

  Value mux(const Value& cond, const Value& a, const Value& b) override {
    const auto* flag = std::get_if<CipherBool>(&cond);
    if (!flag) capability("selection condition must be an encrypted boolean");
    check_key(flag->bit);
    Operand x = operand(a);
    Operand y = operand(b);
    std::int64_t out = flag->bit.payload != 0 ? x.value : y.value;
    record("clear_mux");
    return wrap(out, true);
  }

  Value encrypt_clear(std::int64_t value) override {
    return SimCipher{value, kDefaultFreshBudget, id_};
  }

  Value import_var(const std::string& name, const ContextVar& var) override {
    std::vector<std::int64_t> values;
    if (var.values) {
      values = *var.values;
    } else if (var.envelopes) {
      values.reserve(var.envelopes->size());
      for (std::size_t i = 0; i < var.envelopes->size(); ++i) {
        values.push_back(unseal_value(key_, name,
                                      static_cast<std::uint32_t>(i),
                                      (*var.envelopes)[i]));
      }
    }
    if (var.label == Label::Clear) {
      if (var.kind == VarKind::Scalar) {
        return ClearInt{values.empty() ? 0 : values.front()};
      }
      return ClearVec{std::move(values)};
    }
    if (var.kind == VarKind::Scalar) {
      return SimCipher{values.empty() ? 0 : values.front(),
                       kDefaultFreshBudget, id_};
    }
    CipherVec vec;
    vec.elements.reserve(values.size());
    for (std::int64_t v : values) {
      vec.elements.push_back(SimCipher{v, kDefaultFreshBudget, id_});
    }
    return vec;
  }

  ContextVar export_var(const std::string& name, const Value& value) override {
    if (const auto* i = std::get_if<ClearInt>(&value)) {
      return clear_scalar(i->value);
    }
    if (const auto* b = std::get_if<ClearBool>(&value)) {
      return clear_scalar(b->value ? 1 : 0);
    }
    if (const auto* v = std::get_if<ClearVec>(&value)) {
      return clear_vector(v->values);
    }
    ContextVar out;
    out.label = Label::Encrypted;
    if (const auto* c = std::get_if<SimCipher>(&value)) {
      check_key(*c);
      out.envelopes = std::vector<Envelope>{seal_value(key_, name, 0,
                                                       c->payload)};
      return out;
    }
    if (const auto* cb = std::get_if<CipherBool>(&value)) {
      check_key(cb->bit);
      out.envelopes = std::vector<Envelope>{
          seal_value(key_, name, 0, cb->bit.payload != 0 ? 1 : 0)};
      return out;
    }
    const auto& vec = std::get<CipherVec>(value);
    out.kind = VarKind::Vector;
    std::vector<Envelope> envelopes;
    envelopes.reserve(vec.elements.size());
    for (std::size_t i = 0; i < vec.elements.size(); ++i) {
      check_key(vec.elements[i]);
      envelopes.push_back(seal_value(key_, name, static_cast<std::uint32_t>(i),
                                     vec.elements[i].payload));
    }
    out.envelopes = std::move(envelopes);
    return out;
  }

  std::optional<KeyId> key_id() const override { return id_; }

 private:
  struct Operand {
    std::int64_t value;
    bool enc;
  };

  Operand operand(const Value& v) const {
    if (const auto* i = std::get_if<ClearInt>(&v)) return {i->value, false};
    if (const auto* c = std::get_if<SimCipher>(&v)) {
      check_key(*c);
      return {c->payload, true};
    }
    if (std::holds_alternative<CipherBool>(v) ||
        std::holds_alternative<ClearBool>(v)) {
      capability("boolean cannot be used in arithmetic");
    }
    capability("expected a scalar operand");
  }

  Value wrap(std::int64_t value, bool enc) const {
    if (enc) return SimCipher{value, kDefaultFreshBudget, id_};
    return ClearInt{value};
  }

  template <typename F>
  Value arith(const Value& a, const Value& b, const char* op, F f) {
    Operand x = operand(a);
    Operand y = operand(b);
    std::int64_t out = f(x.value, y.value);
    record(op);
    return wrap(out, x.enc || y.enc);
  }

  void check_key(const SimCipher& c) const {
    if (c.key_id != id_) {
      throw EvalError(RuntimeErrorCode::KeyMismatch, {},
                      "ciphertext under key " + key_id_to_hex(c.key_id) +
                          " used with key " + key_id_to_hex(id_));
    }
  }

  ContextKey key_;
  KeyId id_;
};

}  // namespace

std::unique_ptr<ValueAlgebra> make_clear_algebra(CostTable table,
                                                 const ContextKey* unseal_key) {
  return std::make_unique<ClearAlgebra>(std::move(table), unseal_key);
}

std::unique_ptr<ValueAlgebra> make_fhe_sim_algebra(const ContextKey& key,
                                                   CostTable table,
                                                   long long fresh_budget) {
  return std::make_unique<FheSimAlgebra>(key, std::move(table), fresh_budget);
}

std::unique_ptr<ValueAlgebra> make_tee_sim_algebra(const ContextKey& key,
                                                   CostTable table) {
  return std::make_unique<TeeSimAlgebra>(key, std::move(table));
}

}  // namespace hybridsl
