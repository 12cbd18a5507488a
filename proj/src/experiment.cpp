#include "poolsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "poolsim/error.hpp"

namespace poolsim {

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// by index is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::vector<std::exception_ptr> errors(n);
  auto body = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string_view scope_name(NormalizationScope s) {
  return s == NormalizationScope::PerSystem ? "per-system" : "global";
}

std::string_view denominator_name(DenominatorMode d) {
  return d == DenominatorMode::IdfMean ? "idf" : "mean-abs";
}

}  // namespace

ExperimentConfig ExperimentConfig::with_defaults(std::size_t d_min, std::size_t d_max,
                                                 int rel_threshold) {
  ExperimentConfig c;
  c.d_min = d_min;
  c.d_max = d_max;
  c.rel_threshold = rel_threshold;
  c.policies = {DepthPolicy::cdp_min(d_min, d_max), DepthPolicy::cdp_avg(d_min, d_max),
                DepthPolicy::vdp_linear(d_min, d_max), DepthPolicy::vdp_inverse_linear(d_min, d_max),
                DepthPolicy::cdp_max(d_min, d_max)};
  c.qpp.k = d_max;
  return c;
}

void ExperimentConfig::validate() const {
  if (d_min < 1) throw PreconditionError("d_min must be at least 1");
  if (d_min > d_max) throw PreconditionError("d_min must not exceed d_max");
  if (rel_threshold < 1) throw PreconditionError("relevance threshold must be at least 1");
  if (policies.empty()) throw PreconditionError("no pooling policies configured");
  qpp.validate();
}

DepthPolicy policy_from_name(std::string_view name, std::size_t d_min, std::size_t d_max) {
  if (name == "cdp-min") return DepthPolicy::cdp_min(d_min, d_max);
  if (name == "cdp-avg") return DepthPolicy::cdp_avg(d_min, d_max);
  if (name == "cdp-max") return DepthPolicy::cdp_max(d_min, d_max);
  if (name == "vdp-l") return DepthPolicy::vdp_linear(d_min, d_max);
  if (name == "vdp-il") return DepthPolicy::vdp_inverse_linear(d_min, d_max);
  if (name.starts_with("cdp:")) {
    std::size_t k = 0;
    auto digits = name.substr(4);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && k >= 1) {
      return {fmt::format("CDP-{}", k), CdpFixed{k}};
    }
  }
  throw PreconditionError(fmt::format(
      "unknown policy '{}' (expected cdp-min, cdp-avg, cdp-max, vdp-l, vdp-il or cdp:K)", name));
}

std::vector<DepthPolicy> policies_from_list(std::string_view list, std::size_t d_min,
                                            std::size_t d_max) {
  std::vector<DepthPolicy> out;
  while (!list.empty()) {
    auto comma = list.find(',');
    auto item = list.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(policy_from_name(item, d_min, d_max));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw PreconditionError("empty policy list");
  return out;
}

JudgmentSet induce_qrels(const Pool& pool, const JudgmentSet& full) {
  JudgmentSet induced("induced");
  for (const auto& [qid, docs] : full.by_query()) {
    auto pooled = pool.docs.find(qid);
    if (pooled == pool.docs.end()) continue;
    for (const auto& [docid, grade] : docs) {
      if (pooled->second.count(docid)) induced.add(qid, docid, grade);
    }
  }
  return induced;
}

ExperimentReport run_simulation(std::span<const SystemRun> runs, const JudgmentSet& full_judgments,
                                const QuerySet* queries, const TermStatistics* term_stats,
                                const ExperimentConfig& config) {
  config.validate();
  if (runs.size() < 2) {
    throw ValidationError(fmt::format("need at least 2 systems to correlate, got {}", runs.size()));
  }

  ExperimentReport report;
  std::set<std::string> query_ids;
  for (const auto& [qid, docs] : full_judgments.by_query()) query_ids.insert(qid);
  if (query_ids.empty()) throw ValidationError("full judgments contain no queries");
  report.queries.assign(query_ids.begin(), query_ids.end());

  // Work on the judged queries only, systems sorted by tag.
  std::vector<SystemRun> systems;
  for (const auto& run : runs) {
    SystemRun r{run.system_tag, {}};
    for (const auto& [qid, docs] : run.rankings) {
      if (query_ids.count(qid)) r.rankings.emplace(qid, docs);
    }
    systems.push_back(std::move(r));
  }
  std::sort(systems.begin(), systems.end(),
            [](const SystemRun& a, const SystemRun& b) { return a.system_tag < b.system_tag; });
  for (std::size_t i = 0; i < systems.size(); ++i) {
    if (i > 0 && systems[i].system_tag == systems[i - 1].system_tag) {
      throw ValidationError(fmt::format("duplicate system tag {}", systems[i].system_tag));
    }
    report.systems.push_back(systems[i].system_tag);
  }

  Diagnostics diag;
  std::vector<QppEstimate> estimates;
  const bool need_qpp = std::any_of(config.policies.begin(), config.policies.end(),
                                    [](const DepthPolicy& p) { return p.needs_estimates(); });
  if (need_qpp) {
    NqcPredictor predictor(config.qpp, queries, term_stats);
    estimates = max_normalize(estimate_all(systems, predictor, diag), config.scope);
  }

  for (const auto& run : systems) {
    auto result = mean_average_precision(run, full_judgments, config.rel_threshold);
    report.reference_map.push_back(result.value);
    if (report.reference_skipped.empty()) report.reference_skipped = result.skipped;
  }

  report.rows.resize(config.policies.size());
  parallel_for(config.policies.size(), config.threads, [&](std::size_t p) {
    const auto& policy = config.policies[p];
    try {
      Pool pool = build_pool(systems, policy, estimates, query_ids);
      JudgmentSet induced = induce_qrels(pool, full_judgments);

      PolicyRow row;
      row.policy = policy.label();
      row.definition = policy.describe();
      row.short_runs = pool.short_runs;
      double depth_sum = 0.0;
      for (const auto& [key, d] : pool.depths) depth_sum += static_cast<double>(d);
      row.avg_depth = pool.depths.empty() ? 0.0 : depth_sum / static_cast<double>(pool.depths.size());

      std::set<std::string> skipped;
      for (const auto& run : systems) {
        auto result = mean_average_precision(run, induced, config.rel_threshold);
        row.induced_map.push_back(result.value);
        skipped.insert(result.skipped.begin(), result.skipped.end());
      }
      row.skipped_queries = skipped.size();
      row.pearson_r = pearson_r(row.induced_map, report.reference_map);
      row.kendall_tau = kendall_tau(row.induced_map, report.reference_map);
      row.quality = pool_quality(pool, full_judgments, config.rel_threshold);
      report.rows[p] = std::move(row);
    } catch (const Error& e) {
      throw Error(fmt::format("policy {}: {}", policy.label(), e.what()));
    }
  });

  for (const auto& w : diag.warnings()) report.warnings.push_back(w);
  for (const auto& row : report.rows) {
    if (row.short_runs > 0) {
      report.warnings.push_back(fmt::format("{}: {} (query, run) lists shorter than their depth",
                                            row.policy, row.short_runs));
    }
    if (!row.quality.pnc) {
      report.warnings.push_back(
          fmt::format("{}: average pool size <= 1, PNC undefined", row.policy));
    }
  }

  report.config = {
      {"systems", std::to_string(report.systems.size())},
      {"queries", std::to_string(report.queries.size())},
      {"d_min", std::to_string(config.d_min)},
      {"d_max", std::to_string(config.d_max)},
      {"rel_threshold", std::to_string(config.rel_threshold)},
      {"qpp_k", std::to_string(config.qpp.k)},
      {"qpp_denominator", std::string(denominator_name(config.qpp.denominator))},
      {"qpp_epsilon", fmt::format("{}", config.qpp.epsilon)},
      {"norm_scope", std::string(scope_name(config.scope))},
  };
  report.decisions = {
      "qpp: NQC with population standard deviation over the top-k scores",
      "qpp denominator: mean ln(N/df) over query terms, unseen terms df=0.5; queries without "
      "text fall back to mean absolute top-k score",
      fmt::format("qpp normalization: max over {} groups", scope_name(config.scope)),
      "cdp-avg depth: round((d_min+d_max)/2)",
      "avg depth: mean over (query, run) pairs with retrieved documents",
      "coverage: pooled relevant / total relevant, one ratio over all queries",
      "pnc: coverage / natural log of average pool size",
      "map: queries without relevant documents skipped; judged queries a run did not retrieve "
      "score 0",
      "kendall: tau-b on MAP values",
  };
  return report;
}

std::string write_report_table(const ExperimentReport& report) {
  std::size_t name_width = 4;
  for (const auto& row : report.rows) name_width = std::max(name_width, row.policy.size());

  std::string out = fmt::format("{:<{}}  {:>9}  {:>7}  {:>7}  {:>7}  {:>9}  {:>7}\n", "Pool",
                                name_width, "Avg Depth", "P-r", "K-tau", "C", "|P|-bar", "PNC");
  for (const auto& row : report.rows) {
    out += fmt::format("{:<{}}  {:>9.2f}  {:>7.4f}  {:>7.4f}  {:>7.4f}  {:>9.2f}  {:>7}\n",
                       row.policy, name_width, row.avg_depth, row.pearson_r, row.kendall_tau,
                       row.quality.coverage, row.quality.avg_pool_size,
                       row.quality.pnc ? fmt::format("{:.4f}", *row.quality.pnc) : "NA");
  }
  return out;
}

std::string write_report_csv(const ExperimentReport& report) {
  std::string out =
      "pool,definition,avg_depth,pearson_r,kendall_tau,coverage,avg_pool_size,pnc,short_runs,"
      "skipped_queries\n";
  for (const auto& row : report.rows) {
    out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{}\n", row.policy,
                       row.definition, row.avg_depth, row.pearson_r, row.kendall_tau,
                       row.quality.coverage, row.quality.avg_pool_size,
                       row.quality.pnc ? fmt::format("{:.6f}", *row.quality.pnc) : "NA",
                       row.short_runs, row.skipped_queries);
  }
  return out;
}

std::string write_report_json(const ExperimentReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["pool"] = row.policy;
    r["definition"] = row.definition;
    r["avg_depth"] = row.avg_depth;
    r["pearson_r"] = row.pearson_r;
    r["kendall_tau"] = row.kendall_tau;
    r["coverage"] = row.quality.coverage;
    r["avg_pool_size"] = row.quality.avg_pool_size;
    r["pnc"] = row.quality.pnc ? ordered_json(*row.quality.pnc) : ordered_json(nullptr);
    r["short_runs"] = row.short_runs;
    r["skipped_queries"] = row.skipped_queries;
    r["induced_map"] = row.induced_map;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  doc["systems"] = report.systems;
  doc["reference_map"] = report.reference_map;

  ordered_json meta;
  ordered_json config = ordered_json::object();
  for (const auto& [k, v] : report.config) config[k] = v;
  meta["config"] = std::move(config);
  meta["queries"] = report.queries;
  meta["reference_skipped_queries"] = report.reference_skipped;
  meta["warnings"] = report.warnings;
  meta["decisions"] = report.decisions;
  doc["metadata"] = std::move(meta);
  return doc.dump(2) + "\n";
}

}  // namespace poolsim
