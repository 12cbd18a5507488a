#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "poolsim/error.hpp"
#include "poolsim/experiment.hpp"
#include "poolsim/pooling.hpp"
#include "poolsim/qpp.hpp"
#include "poolsim/synthetic.hpp"
#include "poolsim/trec_io.hpp"

namespace poolsim::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string runs;
  std::string qrels;
  std::string queries;
  std::string term_stats;
  std::size_t d_min = 10;
  std::size_t d_max = 50;
  int rel_threshold = 1;
  std::size_t qpp_k = 0;
  std::string norm_scope = "per-system";
  std::string denominator = "idf";
  std::string out;
  std::size_t threads = 0;
  bool verbose = false;

  std::string policy;
  std::vector<std::string> policies{"cdp-min", "cdp-avg", "vdp-l", "vdp-il", "cdp-max"};
  std::string format = "table";

  SyntheticSpec synthetic;
};

// Inputs resolved from Options; absent optional files stay empty.
struct Inputs {
  std::vector<SystemRun> runs;
  std::optional<JudgmentSet> qrels;
  std::optional<QuerySet> queries;
  std::optional<TermStatistics> term_stats;
};

void require_path(const std::string& path, const char* flag) {
  if (path.empty()) throw ValidationError(fmt::format("{} is required", flag));
  if (!fs::exists(path)) throw ValidationError(fmt::format("{} {}: no such file or directory", flag, path));
}

void check_depths(const Options& o) {
  if (o.d_min < 1) throw ValidationError("d_min must be at least 1");
  if (o.d_min > o.d_max) throw ValidationError("d_min must not exceed d_max");
}

QppConfig qpp_config(const Options& o) {
  QppConfig c;
  c.k = o.qpp_k == 0 ? o.d_max : o.qpp_k;
  c.denominator = o.denominator == "idf" ? DenominatorMode::IdfMean : DenominatorMode::MeanAbsScore;
  return c;
}

NormalizationScope scope(const Options& o) {
  return o.norm_scope == "global" ? NormalizationScope::Global : NormalizationScope::PerSystem;
}

Inputs load_inputs(const Options& o, bool need_qrels, std::ostream& err) {
  Inputs in;
  Diagnostics diag;
  require_path(o.runs, "--runs");
  if (need_qrels) require_path(o.qrels, "--qrels");
  if (!o.qrels.empty()) require_path(o.qrels, "--qrels");
  if (!o.queries.empty()) require_path(o.queries, "--queries");
  if (!o.term_stats.empty()) require_path(o.term_stats, "--term-stats");

  in.runs = load_runs(o.runs, &diag);
  auto annotate = [](const std::string& path, auto&& parse) {
    try {
      return parse(read_file(path));
    } catch (const ParseError& e) {
      throw ParseError(e.line(), e.detail(), path);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: {}", path, e.what()));
    }
  };
  if (!o.qrels.empty()) {
    in.qrels = annotate(o.qrels, [&](const std::string& t) { return parse_qrels(t, &diag); });
  }
  if (!o.queries.empty()) in.queries = annotate(o.queries, [](const std::string& t) { return parse_queries(t); });
  if (!o.term_stats.empty()) {
    in.term_stats = annotate(o.term_stats, [](const std::string& t) { return parse_term_stats(t); });
  }
  if (o.verbose) {
    for (const auto& w : diag.warnings()) err << "poolsim: warning: " << w << "\n";
  }
  return in;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << text;
}

std::vector<QppEstimate> normalized_estimates(const Options& o, const Inputs& in,
                                              std::span<const SystemRun> runs, std::ostream& err) {
  NqcPredictor predictor(qpp_config(o), in.queries ? &*in.queries : nullptr,
                         in.term_stats ? &*in.term_stats : nullptr);
  Diagnostics diag;
  auto estimates = max_normalize(estimate_all(runs, predictor, diag), scope(o));
  if (o.verbose) {
    for (const auto& w : diag.warnings()) err << "poolsim: warning: " << w << "\n";
  }
  return estimates;
}

int cmd_qpp(const Options& o, std::ostream& out, std::ostream& err) {
  check_depths(o);
  auto in = load_inputs(o, false, err);
  auto csv = write_qpp_csv(normalized_estimates(o, in, in.runs, err));
  if (o.out.empty()) {
    out << csv;
  } else {
    write_text(fs::path(o.out) / "qpp.csv", csv);
  }
  return 0;
}

int cmd_pool(const Options& o, std::ostream& /*out*/, std::ostream& err) {
  check_depths(o);
  if (o.out.empty()) throw ValidationError("--out is required");
  auto policy = policy_from_name(o.policy, o.d_min, o.d_max);
  auto in = load_inputs(o, false, err);

  std::set<std::string> query_ids;
  if (in.qrels) {
    for (const auto& [qid, docs] : in.qrels->by_query()) query_ids.insert(qid);
  } else {
    for (const auto& run : in.runs) {
      for (const auto& [qid, docs] : run.rankings) query_ids.insert(qid);
    }
  }
  std::vector<QppEstimate> estimates;
  if (policy.needs_estimates()) estimates = normalized_estimates(o, in, in.runs, err);

  Pool pool = build_pool(in.runs, policy, estimates, query_ids);
  write_text(fs::path(o.out) / "pool.txt", write_pool(pool));
  write_text(fs::path(o.out) / "depths.csv", write_depths_csv(pool));
  if (pool.short_runs > 0 && o.verbose) {
    err << "poolsim: warning: " << pool.short_runs << " (query, run) lists shorter than their depth\n";
  }
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  check_depths(o);
  auto config = ExperimentConfig::with_defaults(o.d_min, o.d_max, o.rel_threshold);
  config.policies = policies_from_list(fmt::format("{}", fmt::join(o.policies, ",")), o.d_min, o.d_max);
  config.qpp = qpp_config(o);
  config.scope = scope(o);
  config.threads = o.threads;
  config.validate();

  auto in = load_inputs(o, true, err);
  auto report = run_simulation(in.runs, *in.qrels, in.queries ? &*in.queries : nullptr,
                               in.term_stats ? &*in.term_stats : nullptr, config);
  if (o.verbose) {
    for (const auto& w : report.warnings) err << "poolsim: warning: " << w << "\n";
  }

  std::string text;
  std::string name;
  if (o.format == "csv") {
    text = write_report_csv(report);
    name = "report.csv";
  } else if (o.format == "structured") {
    text = write_report_json(report);
    name = "report.json";
  } else {
    text = write_report_table(report);
    name = "report.txt";
  }
  if (o.out.empty()) {
    out << text;
  } else {
    write_text(fs::path(o.out) / name, text);
  }
  return 0;
}

int cmd_gen_synthetic(const Options& o, std::ostream& /*out*/, std::ostream& /*err*/) {
  if (o.out.empty()) throw ValidationError("--out is required");
  write_dataset(generate_synthetic(o.synthetic), o.out);
  return 0;
}

void add_input_flags(CLI::App* cmd, Options& o, bool qrels) {
  cmd->add_option("--runs", o.runs, "Directory of TREC run files, one system per file");
  if (qrels) cmd->add_option("--qrels", o.qrels, "TREC qrels file (qid iter docid grade)");
  cmd->add_option("--queries", o.queries, "Query file, one `qid<TAB>text` per line");
  cmd->add_option("--term-stats", o.term_stats, "Term statistics: `N <docs>` then `term df` lines");
}

void add_depth_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--dmin", o.d_min, "Minimum pooling depth")->capture_default_str();
  cmd->add_option("--dmax", o.d_max, "Maximum pooling depth")->capture_default_str();
}

void add_qpp_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--qpp-k", o.qpp_k, "NQC cutoff; 0 uses --dmax")->capture_default_str();
  cmd->add_option("--norm-scope", o.norm_scope, "QPP max-normalization scope")
      ->check(CLI::IsMember({"per-system", "global"}))
      ->capture_default_str();
  cmd->add_option("--denominator", o.denominator,
                  "NQC denominator: idf (needs --queries and --term-stats) or mean-abs")
      ->check(CLI::IsMember({"idf", "mean-abs"}))
      ->capture_default_str();
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--threads", o.threads, "Worker threads, 0 = auto")->capture_default_str();
  cmd->add_flag("-v,--verbose", o.verbose, "Print warnings to standard error");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Simulate constant- and variable-depth pooling over TREC runs", "poolsim"};
  app.set_config("--config", "", "Key-value config file; [section] per subcommand, flags override");
  app.require_subcommand(1);

  auto* qpp = app.add_subcommand("qpp", "Write NQC estimates as CSV (query_id,system_tag,raw,normalized)");
  add_input_flags(qpp, o, false);
  add_depth_flags(qpp, o);
  add_qpp_flags(qpp, o);
  qpp->add_option("--out", o.out, "Output directory for qpp.csv (default: standard output)");
  add_common_flags(qpp, o);

  auto* pool = app.add_subcommand("pool", "Build one pool; writes pool.txt and depths.csv");
  add_input_flags(pool, o, true);
  add_depth_flags(pool, o);
  add_qpp_flags(pool, o);
  pool->add_option("--policy", o.policy, "cdp-min, cdp-avg, cdp-max, vdp-l, vdp-il or cdp:K")
      ->required();
  pool->add_option("--out", o.out, "Output directory")->required();
  add_common_flags(pool, o);

  auto* sim = app.add_subcommand("simulate", "Run the full pooling study and write a report");
  add_input_flags(sim, o, true);
  add_depth_flags(sim, o);
  sim->add_option("--rel-threshold", o.rel_threshold, "Minimum grade counted as relevant")
      ->capture_default_str();
  sim->add_option("--policies", o.policies, "Comma-separated policy list")
      ->delimiter(',')
      ->capture_default_str();
  add_qpp_flags(sim, o);
  sim->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"table", "csv", "structured"}))
      ->capture_default_str();
  sim->add_option("--out", o.out, "Output directory for report.{txt,csv,json} (default: standard output)");
  add_common_flags(sim, o);

  auto* gen = app.add_subcommand("gen-synthetic", "Write a seeded synthetic dataset");
  auto& s = o.synthetic;
  gen->add_option("--out", o.out, "Output directory")->required();
  gen->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  gen->add_option("--systems", s.systems, "Number of systems")->capture_default_str();
  gen->add_option("--num-queries", s.queries, "Number of queries")->capture_default_str();
  gen->add_option("--documents", s.documents, "Collection size")->capture_default_str();
  gen->add_option("--run-depth", s.run_depth, "Documents per (query, run) list")->capture_default_str();
  gen->add_option("--judged-depth", s.judged_depth, "Depth of the pool that is judged")
      ->capture_default_str();
  gen->add_option("--easy-fraction", s.easy_fraction, "Fraction of easy queries")->capture_default_str();
  gen->add_option("--relevant-grade", s.relevant_grade, "Grade of judged relevant documents")
      ->capture_default_str();
  gen->add_flag("-v,--verbose", o.verbose, "Unused; accepted for symmetry");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "poolsim: error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (qpp->parsed()) return cmd_qpp(o, out, err);
    if (pool->parsed()) return cmd_pool(o, out, err);
    if (sim->parsed()) return cmd_simulate(o, out, err);
    return cmd_gen_synthetic(o, out, err);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "poolsim: error: " << msg << "\n";
    return kUsageError;
  }
}

}  // namespace poolsim::cli
