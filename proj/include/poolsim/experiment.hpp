#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poolsim/metrics.hpp"
#include "poolsim/pooling.hpp"
#include "poolsim/qpp.hpp"
#include "poolsim/trec_io.hpp"

namespace poolsim {

struct ExperimentConfig {
  std::size_t d_min = 10;
  std::size_t d_max = 50;
  int rel_threshold = 1;
  std::vector<DepthPolicy> policies;
  QppConfig qpp;
  NormalizationScope scope = NormalizationScope::PerSystem;
  /// Worker cap for policy evaluation; 0 picks the hardware concurrency.
  std::size_t threads = 0;

  /// CDP-Min, CDP-Avg, VDP-L, VDP-IL, CDP-Max over [d_min, d_max], QPP cutoff d_max.
  static ExperimentConfig with_defaults(std::size_t d_min, std::size_t d_max, int rel_threshold);

  void validate() const;
};

/// Resolve a policy name: cdp-min, cdp-avg, cdp-max, vdp-l, vdp-il, or cdp:K.
DepthPolicy policy_from_name(std::string_view name, std::size_t d_min, std::size_t d_max);
/// Comma-separated list of policy names.
std::vector<DepthPolicy> policies_from_list(std::string_view list, std::size_t d_min,
                                            std::size_t d_max);

/// Judgments of `full` restricted to the pooled (query, doc) pairs.
JudgmentSet induce_qrels(const Pool& pool, const JudgmentSet& full);

struct PolicyRow {
  std::string policy;
  std::string definition;
  /// Mean depth over the (query, run) pairs that were pooled.
  double avg_depth = 0.0;
  double pearson_r = 0.0;
  double kendall_tau = 0.0;
  PoolQuality quality;
  std::size_t short_runs = 0;
  std::size_t skipped_queries = 0;
  /// MAP per system under the induced judgments, ordered like the report's systems.
  std::vector<double> induced_map;
};

struct ExperimentReport {
  std::vector<std::string> systems;
  std::vector<std::string> queries;
  /// MAP per system under the full judgments.
  std::vector<double> reference_map;
  std::vector<PolicyRow> rows;

  std::vector<std::string> reference_skipped;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> decisions;
};

/// Full pooling study: NQC at k = d_max per (query, run), max-normalized; one
/// pool per policy; MAP of every system under induced and full judgments;
/// rank correlation and pool quality per policy. The query set is the set of
/// queries in `full_judgments`. `queries`/`term_stats` may be null when the
/// QPP denominator does not need them.
ExperimentReport run_simulation(std::span<const SystemRun> runs, const JudgmentSet& full_judgments,
                                const QuerySet* queries, const TermStatistics* term_stats,
                                const ExperimentConfig& config);

/// Aligned text table: Pool, Avg Depth, P-r, K-tau, C, |P|-bar, PNC.
std::string write_report_table(const ExperimentReport& report);
std::string write_report_csv(const ExperimentReport& report);
/// JSON document with every row, per-system MAP vectors and metadata.
std::string write_report_json(const ExperimentReport& report);

}  // namespace poolsim
