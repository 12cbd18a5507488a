#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poolsim/pooling.hpp"
#include "poolsim/trec_io.hpp"

namespace poolsim {

/// Non-interpolated average precision of `ranking` for one query. Unjudged
/// documents count as non-relevant; 0 when the query has no relevant documents.
double average_precision(std::span<const std::string> ranking, const JudgmentSet& judgments,
                         std::string_view query_id, int rel_threshold);

struct MapResult {
  double value = 0.0;
  /// Queries averaged over (relevant count >= 1).
  std::size_t evaluated = 0;
  /// Queries seen in the run or the judgments with no relevant documents.
  std::vector<std::string> skipped;
};

/// Mean AP over every query with at least one relevant judgment. A judged
/// query the run did not retrieve contributes AP 0. Throws ValidationError
/// when no query has a relevant document.
MapResult mean_average_precision(const SystemRun& run, const JudgmentSet& judgments,
                                 int rel_threshold);

/// Relevant documents captured by the pool over the total relevant count of
/// `full_judgments` (a single ratio over all queries).
double coverage(const Pool& pool, const JudgmentSet& full_judgments, int rel_threshold);

/// Mean number of pooled documents per pooled query.
double avg_pool_size(const Pool& pool);

/// coverage / ln(avg_pool_size). Requires avg_pool_size > 1.
double pnc(double coverage, double avg_pool_size);

/// Pool-size normalized coverage and its inputs.
struct PoolQuality {
  double coverage = 0.0;
  double avg_pool_size = 0.0;
  /// Absent when avg_pool_size <= 1.
  std::optional<double> pnc;
};

PoolQuality pool_quality(const Pool& pool, const JudgmentSet& full_judgments, int rel_threshold);

double pearson_r(std::span<const double> x, std::span<const double> y);

/// Kendall's tau-b, O(n log n).
double kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace poolsim
