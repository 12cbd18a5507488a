#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poolsim/diagnostics.hpp"
#include "poolsim/trec_io.hpp"

namespace poolsim {

enum class DenominatorMode {
  IdfMean,       ///< mean idf of the query terms, from collection term statistics
  MeanAbsScore,  ///< mean absolute retrieval score of the top-k documents
};

enum class NormalizationScope {
  PerSystem,  ///< max taken over the queries of one system
  Global,     ///< max taken over every (query, system) pair
};

struct QppConfig {
  std::size_t k = 50;
  DenominatorMode denominator = DenominatorMode::IdfMean;
  double epsilon = 1e-9;

  void validate() const;
};

struct QppEstimate {
  std::string query_id;
  std::string system_tag;
  double raw = 0.0;
  std::optional<double> normalized;
};

/// Mean over the query terms of ln(N / df(t)); unseen terms use df = 0.5.
double collection_score(std::span<const std::string> query_terms, const TermStatistics& stats);

/// Standard deviation (population form) of the first min(k, n) scores divided
/// by max(p_q_c, epsilon). Zero for fewer than two scores; `degenerate` is set
/// when `scores` is empty.
double nqc(std::span<const double> scores, std::size_t k, double p_q_c, double epsilon,
           bool* degenerate = nullptr);

/// Divide each raw estimate by the maximum raw value of its scope group.
/// A group whose maximum is zero normalizes to all zeros.
std::vector<QppEstimate> max_normalize(std::vector<QppEstimate> estimates,
                                       NormalizationScope scope = NormalizationScope::PerSystem);

/// A post-retrieval predictor: a function of the query and its top-ranked
/// documents. NQC is the only built-in estimator.
class PostRetrievalPredictor {
 public:
  virtual ~PostRetrievalPredictor() = default;

  virtual std::string_view name() const = 0;
  /// `top_docs` is the canonical ranking truncated to the predictor's cutoff.
  virtual double predict(std::string_view query_id, std::span<const RankedDoc> top_docs,
                         Diagnostics& diag) const = 0;
  virtual std::size_t cutoff() const = 0;
};

class NqcPredictor final : public PostRetrievalPredictor {
 public:
  /// `queries` and `stats` may be null only when the denominator mode is
  /// MeanAbsScore. They must outlive the predictor.
  NqcPredictor(QppConfig config, const QuerySet* queries, const TermStatistics* stats);

  std::string_view name() const override { return "nqc"; }
  double predict(std::string_view query_id, std::span<const RankedDoc> top_docs,
                 Diagnostics& diag) const override;
  std::size_t cutoff() const override { return config_.k; }

  /// Denominator actually used for a query: idf mean when available, otherwise
  /// the mean absolute score of `top_docs`.
  double denominator(std::string_view query_id, std::span<const RankedDoc> top_docs,
                     Diagnostics& diag) const;

 private:
  QppConfig config_;
  const QuerySet* queries_;
  const TermStatistics* stats_;
};

/// Run the predictor on every (query, run) pair present in the runs. Results
/// are ordered by system tag, then query id. Queries with fewer documents than
/// the cutoff are reported through `diag`.
std::vector<QppEstimate> estimate_all(std::span<const SystemRun> runs,
                                      const PostRetrievalPredictor& predictor, Diagnostics& diag);

/// `query_id,system_tag,raw,normalized` with a header line.
std::string write_qpp_csv(std::span<const QppEstimate> estimates);

}  // namespace poolsim
