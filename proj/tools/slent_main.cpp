// Command-line entailment checker.
//
// Reads one entailment in the DSL (or, with --batch, several separated by
// blank lines), decides it, and prints one verdict per entailment:
// "valid", "invalid", "condition-violated: <atom>" or "resource-exceeded".
// Exit codes: 0 / 1 / 2 / 4 respectively, 3 for parse or usage errors.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "slent/context.hpp"
#include "slent/oracle.hpp"
#include "slent/parser.hpp"
#include "slent/printer.hpp"
#include "slent/sla.hpp"
#include "slent/slal.hpp"

namespace {

struct CliConfig {
  std::string mode = "auto";
  unsigned pt = 2;
  bool proof = false;
  std::string emit_smt;
  std::string oracle_check;  // "VMAX,HMAX"
  std::string backend = "internal";
  bool trace = false;
  bool batch = false;
  bool no_prune = false;
};

constexpr int kExitValid = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCondition = 2;
constexpr int kExitUsage = 3;
constexpr int kExitResource = 4;

int verdict_code(const slent::sla::Verdict &v) {
  switch (v.kind) {
    case slent::sla::VerdictKind::Valid: return kExitValid;
    case slent::sla::VerdictKind::Invalid: return kExitInvalid;
    case slent::sla::VerdictKind::ConditionViolated: return kExitCondition;
    case slent::sla::VerdictKind::ResourceExceeded: return kExitResource;
  }
  return kExitUsage;
}

void print_verdict(const slent::sla::Verdict &v) {
  switch (v.kind) {
    case slent::sla::VerdictKind::Valid:
      std::cout << "valid\n";
      break;
    case slent::sla::VerdictKind::Invalid:
      std::cout << "invalid\n";
      break;
    case slent::sla::VerdictKind::ConditionViolated:
      std::cout << "condition-violated: " << v.reason << "\n";
      break;
    case slent::sla::VerdictKind::ResourceExceeded:
      std::cout << "resource-exceeded\n";
      break;
  }
}

void write_smt(const std::string &path, const std::vector<slent::SmtObligation> &obs) {
  // One script for the whole entailment: it is valid iff the conjunction of
  // the obligation sentences is valid, so the script asserts the negation
  // and an external solver answering "unsat" certifies validity.
  std::vector<slent::presburger::PbFormula> parts;
  for (const auto &o : obs) parts.push_back(o.sentence);
  auto sentence = slent::presburger::PbFormula::conj(std::move(parts));
  std::ofstream out(path);
  out << "; unsat <=> the entailment is valid\n";
  out << slent::presburger::to_smtlib(slent::presburger::PbFormula::negation(sentence));
}

void run_oracle_check(const slent::Entailment &e, const std::string &spec,
                      const slent::sla::Verdict &v) {
  std::uint64_t vmax = 8;
  std::size_t hmax = 5;
  if (std::sscanf(spec.c_str(), "%llu,%zu", (unsigned long long *)&vmax, &hmax) != 2) {
    std::cerr << "slent: bad --oracle-check bounds '" << spec << "'\n";
    return;
  }
  slent::oracle::Bounds b{vmax, hmax, 0};
  auto cm = slent::oracle::find_countermodel(e, b);
  if (!cm) {
    std::cout << "oracle: no countermodel within bounds ("
              << (v.kind == slent::sla::VerdictKind::Valid ? "agrees" : "inconclusive") << ")\n";
    return;
  }
  std::ostringstream os;
  os << "store{";
  for (const auto &[k, val] : cm->first) os << " " << k << "=" << val;
  os << " } heap{";
  for (const auto &[addr, cell] : cm->second) {
    os << " " << addr << "->(";
    for (std::size_t i = 0; i < cell.size(); ++i) os << (i ? "," : "") << cell[i];
    os << ")";
  }
  os << " }";
  std::cout << "oracle: countermodel " << os.str() << "\n";
  if (v.kind == slent::sla::VerdictKind::Valid)
    std::cerr << "slent: HARD FAILURE: decider says valid but the oracle found a countermodel\n";
}

int process_one(const std::string &text, const CliConfig &cfg, int index) {
  slent::Entailment e;
  try {
    e = slent::parse_entailment(text, slent::ParseOptions{cfg.pt});
  } catch (const slent::ParseError &err) {
    std::cerr << "slent: parse error: " << err.what() << "\n";
    return kExitUsage;
  }

  bool list_free = slent::is_list_free(e);
  std::string mode = cfg.mode;
  if (mode == "auto") mode = list_free ? "sla" : "slal";
  if (mode == "sla" && !list_free) {
    std::cerr << "slent: mode=sla but the input contains list atoms\n";
    return kExitUsage;
  }
  bool qf = e.antecedent.is_qf();
  for (const auto &s : e.succedents) qf = qf && s.is_qf();
  if (mode == "slal" && !qf) {
    std::cerr << "slent: slal mode needs quantifier-free entailments\n";
    return kExitUsage;
  }
  if (cfg.backend == "smtlib-export-only") {
    if (cfg.emit_smt.empty()) {
      std::cerr << "slent: --backend smtlib-export-only needs --emit-smt PATH\n";
      return kExitUsage;
    }
    if (mode != "sla") {
      std::cerr << "slent: smtlib-export-only is available on the list-free route only\n";
      return kExitUsage;
    }
  }

  slent::Options opts;
  opts.pt = cfg.pt;
  opts.export_only = cfg.backend == "smtlib-export-only";
  if (cfg.no_prune || opts.export_only) opts.prune_permutations = false;
  slent::DecisionContext ctx(opts);
  if (cfg.trace) ctx.trace = [](const std::string &m) { std::cerr << "[trace] " << m << "\n"; };
  std::vector<slent::SmtObligation> obligations;
  if (!cfg.emit_smt.empty() || cfg.proof) ctx.obligations = &obligations;

  slent::sla::Verdict verdict;
  std::optional<slent::slal::SlalResult> slal_result;
  try {
    if (mode == "sla") {
      verdict = slent::sla::decide_sla(e, ctx);
    } else {
      slal_result = slent::slal::decide_slal_full(e, ctx);
      verdict = slal_result->verdict;
    }
  } catch (const std::invalid_argument &err) {
    std::cerr << "slent: " << err.what() << "\n";
    return kExitUsage;
  }

  if (!cfg.emit_smt.empty()) {
    std::string path = cfg.emit_smt;
    if (cfg.batch) path += "." + std::to_string(index);
    write_smt(path, obligations);
  }

  if (opts.export_only) {
    std::cout << "exported\n";
    return kExitValid;
  }

  print_verdict(verdict);

  if (cfg.proof) {
    if (mode == "slal" && slal_result) {
      for (std::size_t i = 0; i < slal_result->judgments.size(); ++i) {
        std::cout << "; judgment " << i + 1 << ": "
                  << slent::slal::render_judgment(slal_result->judgments[i]) << "\n";
        if (slal_result->derivations[i])
          std::cout << slent::slal::render_proof(*slal_result->derivations[i]);
        else
          std::cout << "  (no derivation)\n";
      }
    } else {
      for (const auto &o : obligations)
        std::cout << "; permutation " << o.label << "\n  "
                  << slent::presburger::to_string(o.sentence) << "\n";
    }
  }

  // Countermodel search needs a QF antecedent; succedent binders are fine
  // (the reference semantics enumerates them within bounds).
  if (!cfg.oracle_check.empty() && e.antecedent.is_qf())
    run_oracle_check(e, cfg.oracle_check, verdict);

  return verdict_code(verdict);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"entailment checker for symbolic heaps with arrays and lists"};
  CliConfig cfg;
  std::string input_path;

  app.add_option("file", input_path, "input file (default: stdin)");
  app.add_option("--mode", cfg.mode, "auto|sla|slal")->default_val("auto");
  app.add_option("--pt", cfg.pt, "points-to arity (lists need 2)")->default_val(2);
  app.add_flag("--proof", cfg.proof, "print the derivation / Presburger sentences");
  app.add_option("--emit-smt", cfg.emit_smt, "write SMT-LIB2 script(s) to PATH");
  app.add_option("--oracle-check", cfg.oracle_check,
                 "VMAX,HMAX: cross-check with bounded countermodel search");
  app.add_option("--backend", cfg.backend, "internal|smtlib-export-only")
      ->default_val("internal");
  app.add_flag("--trace", cfg.trace, "trace rule applications to stderr");
  app.add_flag("--batch", cfg.batch, "input holds several entailments separated by blank lines");
  app.add_flag("--no-prune", cfg.no_prune, "disable permutation pruning");
  CLI11_PARSE(app, argc, argv);

  if (cfg.mode != "auto" && cfg.mode != "sla" && cfg.mode != "slal") {
    std::cerr << "slent: unknown mode '" << cfg.mode << "'\n";
    return kExitUsage;
  }
  if (cfg.pt < 1) {
    std::cerr << "slent: pt must be at least 1\n";
    return kExitUsage;
  }

  std::string input;
  if (!input_path.empty()) {
    std::ifstream in(input_path);
    if (!in) {
      std::cerr << "slent: cannot open " << input_path << "\n";
      return kExitUsage;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    input = ss.str();
  } else {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    input = ss.str();
  }

  if (!cfg.batch) return process_one(input, cfg, 0);

  // Split on blank lines; entries are independent and failures don't abort.
  std::vector<std::string> entries;
  std::string cur;
  std::istringstream lines(input);
  std::string line;
  auto flush = [&]() {
    if (cur.find_first_not_of(" \t\r\n") != std::string::npos) entries.push_back(cur);
    cur.clear();
  };
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
    } else {
      cur += line;
      cur += "\n";
    }
  }
  flush();

  int worst = kExitValid;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    int code = process_one(entries[i], cfg, static_cast<int>(i));
    worst = std::max(worst, code);
  }
  return worst;
}
