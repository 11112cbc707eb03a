#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hybridsl/backends.hpp"
#include "hybridsl/engine.hpp"

namespace {

using namespace hybridsl;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError("cannot read " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Program parse_program_file(const std::string& path) {
  std::string source = read_file(path);
  try {
    return parse(source);
  } catch (const LexError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Context load_context_checked(const std::string& path) {
  try {
    return load_context(read_file(path));
  } catch (const FormatError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

CostTable load_cost_table(const std::string& path) {
  if (path.empty()) return CostTable::defaults();
  try {
    return cost_table_from_json(read_file(path));
  } catch (const FormatError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// --key falls back to the HYBRIDSL_KEY environment variable.
std::optional<ContextKey> load_key_option(const std::string& key_path) {
  std::string path = key_path;
  if (path.empty()) {
    if (const char* env = std::getenv("HYBRIDSL_KEY")) path = env;
  }
  if (path.empty()) return std::nullopt;
  try {
    return load_key_file(path);
  } catch (const FormatError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct BackendChoice {
  std::string name;
  std::function<std::unique_ptr<ValueAlgebra>()> make;
};

BackendChoice resolve_backend(const std::string& name, const CostTable& table,
                              const std::optional<ContextKey>& key,
                              bool context_sealed) {
  if (name == "clear") {
    if (context_sealed && !key) {
      throw UsageError("sealed context requires --key or HYBRIDSL_KEY");
    }
    std::optional<ContextKey> k = key;
    return {name, [table, k]() {
              return make_clear_algebra(table, k ? &*k : nullptr);
            }};
  }
  if (name == "fhe-sim" || name == "tee-sim") {
    if (!key) {
      throw UsageError("backend " + name +
                       " requires --key or HYBRIDSL_KEY");
    }
    ContextKey k = *key;
    if (name == "fhe-sim") {
      return {name, [table, k]() { return make_fhe_sim_algebra(k, table); }};
    }
    return {name, [table, k]() { return make_tee_sim_algebra(k, table); }};
  }
  throw UsageError("unknown backend '" + name +
                   "' (expected clear, fhe-sim, or tee-sim)");
}

bool context_sealed(const Context& context) {
  for (const auto& [name, var] : context.variables) {
    if (var.envelopes) return true;
  }
  return false;
}

// Prints violations and throws when the program does not check.
void require_checked(const Program& program, const Context& context) {
  CheckResult result = check_program(program, derive_signature(context));
  if (result.ok()) return;
  for (const Violation& v : result.violations) {
    std::cout << render_violation(v) << '\n';
  }
  throw DomainError("");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out.flush()) throw UsageError("cannot write " + path);
}

int cmd_check(const std::string& program_path,
              const std::string& context_path) {
  Program program = parse_program_file(program_path);
  Signature signature;
  try {
    signature = load_signature(read_file(context_path));
  } catch (const FormatError& e) {
    throw UsageError(context_path + ": " + e.what());
  }
  CheckResult result = check_program(program, signature);
  for (const Violation& v : result.violations) {
    std::cout << render_violation(v) << '\n';
  }
  return result.ok() ? kExitOk : kExitDomain;
}

int cmd_run(const std::string& program_path, const std::string& context_path,
            const std::string& backend_name, const std::string& key_path,
            const std::string& out_path, const std::vector<std::string>& only,
            const std::string& cost_table_path) {
  Program program = parse_program_file(program_path);
  Context input = load_context_checked(context_path);
  CostTable table = load_cost_table(cost_table_path);
  std::optional<ContextKey> key = load_key_option(key_path);
  BackendChoice backend =
      resolve_backend(backend_name, table, key, context_sealed(input));
  require_checked(program, input);
  auto algebra = backend.make();
  EvalOutput out = evaluate(program, input, *algebra);
  if (!only.empty()) {
    Context filtered;
    filtered.version = out.context.version;
    filtered.key_id = out.context.key_id;
    for (const std::string& name : only) {
      auto it = out.context.variables.find(name);
      if (it == out.context.variables.end()) {
        throw UsageError("variable '" + name + "' is not in the output");
      }
      filtered.variables.insert(*it);
    }
    out.context = std::move(filtered);
  }
  std::cerr << op_report_to_json(backend.name, out.report);
  write_output(out_path, save_context(out.context));
  return kExitOk;
}

int cmd_bench(const std::string& program_path, const std::string& context_path,
              const std::vector<std::string>& backend_names, int reps,
              const std::string& key_path, const std::string& cost_table_path,
              bool json) {
  Program program = parse_program_file(program_path);
  Context input = load_context_checked(context_path);
  CostTable table = load_cost_table(cost_table_path);
  std::optional<ContextKey> key = load_key_option(key_path);
  bool sealed = context_sealed(input);
  std::vector<BackendSpec> backends;
  for (const std::string& name : backend_names) {
    BackendChoice choice = resolve_backend(name, table, key, sealed);
    backends.push_back(BackendSpec{choice.name, choice.make});
  }
  require_checked(program, input);
  std::vector<BenchRow> rows =
      run_bench(program, input, backends, reps, key ? &*key : nullptr);
  std::cout << (json ? bench_rows_to_json(rows) : bench_rows_to_table(rows));
  return kExitOk;
}

int cmd_dump_ast(const std::string& program_path, const std::string& format) {
  Program program = parse_program_file(program_path);
  if (format == "json") {
    std::cout << ast_to_json(program);
  } else {
    std::cout << ast_to_text(program);
  }
  return kExitOk;
}

int cmd_keygen(const std::string& out_path) {
  save_key_file(generate_key(), out_path);
  return kExitOk;
}

int cmd_seal(const std::string& key_path, const std::string& in_path,
             const std::string& out_path, bool unseal) {
  std::optional<ContextKey> key = load_key_option(key_path);
  if (!key) throw UsageError("requires --key or HYBRIDSL_KEY");
  Context context = load_context_checked(in_path);
  Context result =
      unseal ? unseal_context(context, *key) : seal_context(context, *key);
  write_output(out_path, save_context(result));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid secure-computation DSL toolchain"};
  app.require_subcommand(1);

  std::string program_path;
  std::string context_path;
  std::string backend_name = "clear";
  std::vector<std::string> backend_names;
  std::string key_path;
  std::string out_path;
  std::string in_path;
  std::string cost_table_path;
  std::string format = "text";
  std::vector<std::string> only;
  int reps = 5;
  bool json = false;

  CLI::App* check = app.add_subcommand(
      "check", "Check a program against a context or signature");
  check->add_option("program", program_path, "DSL source file")->required();
  check->add_option("context", context_path, "context or signature JSON")
      ->required();

  CLI::App* run = app.add_subcommand("run", "Run a program on one backend");
  run->add_option("program", program_path, "DSL source file")->required();
  run->add_option("--context", context_path, "input context JSON")->required();
  run->add_option("--backend", backend_name, "clear, fhe-sim, or tee-sim");
  run->add_option("--key", key_path, "context key file");
  run->add_option("--out", out_path, "output context path (default stdout)");
  run->add_option("--only", only, "emit only these variables")->delimiter(',');
  run->add_option("--cost-table", cost_table_path, "cost table JSON");

  CLI::App* bench =
      app.add_subcommand("bench", "Compare backends on one program");
  bench->add_option("program", program_path, "DSL source file")->required();
  bench->add_option("--context", context_path, "input context JSON")
      ->required();
  bench
      ->add_option("--backends", backend_names,
                   "backends to compare (default all three)")
      ->delimiter(',');
  bench->add_option("--reps", reps, "repetitions per backend");
  bench->add_option("--key", key_path, "context key file");
  bench->add_option("--cost-table", cost_table_path, "cost table JSON");
  bench->add_flag("--json", json, "emit JSON instead of a table");

  CLI::App* dump = app.add_subcommand("dump-ast", "Print a program's AST");
  dump->add_option("program", program_path, "DSL source file")->required();
  dump->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* keygen = app.add_subcommand("keygen", "Generate a context key");
  keygen->add_option("--out", out_path, "key file path")->required();

  CLI::App* seal = app.add_subcommand(
      "seal", "Seal the encrypted variables of a clear-authored context");
  seal->add_option("--key", key_path, "context key file");
  seal->add_option("--in", in_path, "input context JSON")->required();
  seal->add_option("--out", out_path, "output context path (default stdout)");

  CLI::App* unseal = app.add_subcommand(
      "unseal", "Unseal a context's envelopes for inspection");
  unseal->add_option("--key", key_path, "context key file");
  unseal->add_option("--in", in_path, "input context JSON")->required();
  unseal->add_option("--out", out_path,
                     "output context path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(check)) return cmd_check(program_path, context_path);
    if (app.got_subcommand(run)) {
      return cmd_run(program_path, context_path, backend_name, key_path,
                     out_path, only, cost_table_path);
    }
    if (app.got_subcommand(bench)) {
      if (backend_names.empty()) {
        backend_names = {"clear", "fhe-sim", "tee-sim"};
      }
      return cmd_bench(program_path, context_path, backend_names, reps,
                       key_path, cost_table_path, json);
    }
    if (app.got_subcommand(dump)) return cmd_dump_ast(program_path, format);
    if (app.got_subcommand(keygen)) return cmd_keygen(out_path);
    if (app.got_subcommand(seal)) {
      return cmd_seal(key_path, in_path, out_path, false);
    }
    return cmd_seal(key_path, in_path, out_path, true);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    if (*e.what()) std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const EvalError& e) {
    std::cerr << "ERROR " << e.what() << '\n';
    return kExitDomain;
  } catch (const AuthFailure& e) {
    std::cerr << "ERROR AUTH_FAILURE " << e.what() << '\n';
    return kExitDomain;
  } catch (const MismatchError& e) {
    std::cerr << "ERROR MISMATCH " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
