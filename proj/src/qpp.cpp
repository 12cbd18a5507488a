#include "poolsim/qpp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "poolsim/error.hpp"

namespace poolsim {

namespace {

constexpr double kUnseenDf = 0.5;

}  // namespace

void QppConfig::validate() const {
  if (k < 1) throw PreconditionError("QPP cutoff k must be at least 1");
  if (!(epsilon > 0.0)) throw PreconditionError("QPP epsilon must be positive");
}

double collection_score(std::span<const std::string> query_terms, const TermStatistics& stats) {
  if (query_terms.empty()) throw PreconditionError("collection_score: empty query");
  if (stats.doc_count < 1) throw PreconditionError("collection_score: document count is zero");
  const double n = static_cast<double>(stats.doc_count);
  double sum = 0.0;
  for (const auto& term : query_terms) {
    auto df = stats.df(term);
    sum += std::log(n / (df ? static_cast<double>(*df) : kUnseenDf));
  }
  return sum / static_cast<double>(query_terms.size());
}

double nqc(std::span<const double> scores, std::size_t k, double p_q_c, double epsilon,
           bool* degenerate) {
  if (k < 1) throw PreconditionError("nqc: k must be at least 1");
  if (degenerate) *degenerate = scores.empty();
  const auto top = scores.first(std::min(k, scores.size()));
  if (top.size() <= 1) return 0.0;

  // Welford accumulation of the population variance.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double s : top) {
    ++count;
    const double delta = s - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (s - mean);
  }
  const double sd = std::sqrt(std::max(m2, 0.0) / static_cast<double>(count));
  return sd / std::max(p_q_c, epsilon);
}

std::vector<QppEstimate> max_normalize(std::vector<QppEstimate> estimates,
                                       NormalizationScope scope) {
  std::map<std::string, double> group_max;
  auto key = [scope](const QppEstimate& e) {
    return scope == NormalizationScope::PerSystem ? e.system_tag : std::string();
  };
  for (const auto& e : estimates) {
    auto [it, inserted] = group_max.emplace(key(e), e.raw);
    if (!inserted) it->second = std::max(it->second, e.raw);
  }
  for (auto& e : estimates) {
    const double m = group_max.at(key(e));
    e.normalized = m > 0.0 ? std::clamp(e.raw / m, 0.0, 1.0) : 0.0;
  }
  return estimates;
}

NqcPredictor::NqcPredictor(QppConfig config, const QuerySet* queries, const TermStatistics* stats)
    : config_(config), queries_(queries), stats_(stats) {
  config_.validate();
  if (config_.denominator == DenominatorMode::IdfMean && (!queries_ || !stats_)) {
    throw PreconditionError(
        "idf denominator needs both a query file and term statistics "
        "(use the mean-abs denominator to run without them)");
  }
}

double NqcPredictor::denominator(std::string_view query_id, std::span<const RankedDoc> top_docs,
                                 Diagnostics& diag) const {
  if (config_.denominator == DenominatorMode::IdfMean) {
    if (const auto* terms = queries_->find(query_id)) return collection_score(*terms, *stats_);
    diag.warn(fmt::format("query {} missing from query set; using mean-abs denominator", query_id));
  }
  if (top_docs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : top_docs) sum += std::abs(d.score);
  return sum / static_cast<double>(top_docs.size());
}

double NqcPredictor::predict(std::string_view query_id, std::span<const RankedDoc> top_docs,
                             Diagnostics& diag) const {
  std::vector<double> scores;
  scores.reserve(top_docs.size());
  for (const auto& d : top_docs) scores.push_back(d.score);
  bool degenerate = false;
  const double value =
      nqc(scores, config_.k, denominator(query_id, top_docs, diag), config_.epsilon, &degenerate);
  if (degenerate) diag.warn(fmt::format("query {} has no retrieved documents", query_id));
  return value;
}

std::vector<QppEstimate> estimate_all(std::span<const SystemRun> runs,
                                      const PostRetrievalPredictor& predictor, Diagnostics& diag) {
  std::vector<const SystemRun*> ordered;
  for (const auto& r : runs) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const SystemRun* a, const SystemRun* b) { return a->system_tag < b->system_tag; });

  std::vector<QppEstimate> out;
  std::size_t short_lists = 0;
  for (const auto* run : ordered) {
    for (const auto& [qid, docs] : run->rankings) {
      const std::size_t n = std::min(predictor.cutoff(), docs.size());
      if (docs.size() < predictor.cutoff()) ++short_lists;
      const std::span<const RankedDoc> top(docs.data(), n);
      out.push_back({qid, run->system_tag, predictor.predict(qid, top, diag), std::nullopt});
    }
  }
  if (short_lists > 0) {
    diag.warn(fmt::format("{} (query, run) lists shorter than the {} cutoff {}", short_lists,
                          predictor.name(), predictor.cutoff()));
  }
  return out;
}

std::string write_qpp_csv(std::span<const QppEstimate> estimates) {
  std::string out = "query_id,system_tag,raw,normalized\n";
  for (const auto& e : estimates) {
    out += fmt::format("{},{},{},{}\n", e.query_id, e.system_tag, e.raw,
                       e.normalized ? fmt::format("{}", *e.normalized) : std::string());
  }
  return out;
}

}  // namespace poolsim
