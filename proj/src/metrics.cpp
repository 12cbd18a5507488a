#include "poolsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "poolsim/error.hpp"

namespace poolsim {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* who) {
  if (x.size() != y.size()) {
    throw PreconditionError(fmt::format("{}: length mismatch ({} vs {})", who, x.size(), y.size()));
  }
  if (x.size() < 2) throw PreconditionError(fmt::format("{}: need at least 2 points", who));
}

// Pairs tied within each run of equal values of a sorted sequence.
template <typename It, typename Eq>
std::uint64_t tied_pairs(It first, It last, Eq eq) {
  std::uint64_t ties = 0;
  while (first != last) {
    auto run_end = std::next(first);
    while (run_end != last && eq(*first, *run_end)) ++run_end;
    const auto t = static_cast<std::uint64_t>(std::distance(first, run_end));
    ties += t * (t - 1) / 2;
    first = run_end;
  }
  return ties;
}

// Stable merge sort on y, returning the number of exchanges (strict inversions).
std::uint64_t sort_counting_swaps(std::vector<double>& v, std::vector<double>& buf,
                                  std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = sort_counting_swaps(v, buf, lo, mid) + sort_counting_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double average_precision(std::span<const std::string> ranking, const JudgmentSet& judgments,
                         std::string_view query_id, int rel_threshold) {
  const std::size_t relevant = judgments.relevant_count(query_id, rel_threshold);
  if (relevant == 0) return 0.0;
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    auto g = judgments.grade(query_id, ranking[i]);
    if (g && *g >= rel_threshold) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant);
}

MapResult mean_average_precision(const SystemRun& run, const JudgmentSet& judgments,
                                 int rel_threshold) {
  std::set<std::string> queries;
  for (const auto& [qid, docs] : run.rankings) queries.insert(qid);
  for (const auto& [qid, docs] : judgments.by_query()) queries.insert(qid);

  MapResult result;
  double sum = 0.0;
  std::vector<std::string> ranking;
  for (const auto& qid : queries) {
    if (judgments.relevant_count(qid, rel_threshold) == 0) {
      result.skipped.push_back(qid);
      continue;
    }
    ranking.clear();
    if (const auto* docs = run.find(qid)) {
      for (const auto& d : *docs) ranking.push_back(d.doc_id);
    }
    sum += average_precision(ranking, judgments, qid, rel_threshold);
    ++result.evaluated;
  }
  if (result.evaluated == 0) {
    throw ValidationError(fmt::format("run {}: no query has a document with grade >= {}",
                                      run.system_tag, rel_threshold));
  }
  result.value = sum / static_cast<double>(result.evaluated);
  return result;
}

double coverage(const Pool& pool, const JudgmentSet& full_judgments, int rel_threshold) {
  const std::size_t total = full_judgments.total_relevant(rel_threshold);
  if (total == 0) {
    throw ValidationError(
        fmt::format("coverage undefined: no judged document has grade >= {}", rel_threshold));
  }
  std::size_t found = 0;
  for (const auto& [qid, docs] : pool.docs) {
    for (const auto& d : docs) {
      auto g = full_judgments.grade(qid, d);
      if (g && *g >= rel_threshold) ++found;
    }
  }
  return static_cast<double>(found) / static_cast<double>(total);
}

double avg_pool_size(const Pool& pool) {
  if (pool.docs.empty()) throw PreconditionError("avg_pool_size: pool has no queries");
  std::size_t total = 0;
  for (const auto& [qid, docs] : pool.docs) total += docs.size();
  return static_cast<double>(total) / static_cast<double>(pool.docs.size());
}

double pnc(double coverage, double avg_pool_size) {
  if (!(avg_pool_size > 1.0)) {
    throw PreconditionError(
        fmt::format("pnc: average pool size {} must exceed 1", avg_pool_size));
  }
  return coverage / std::log(avg_pool_size);
}

PoolQuality pool_quality(const Pool& pool, const JudgmentSet& full_judgments, int rel_threshold) {
  PoolQuality q;
  q.coverage = coverage(pool, full_judgments, rel_threshold);
  q.avg_pool_size = avg_pool_size(pool);
  if (q.avg_pool_size > 1.0) q.pnc = pnc(q.coverage, q.avg_pool_size);
  return q;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "pearson_r");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw PreconditionError("pearson_r: constant input vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "kendall_tau");
  const std::size_t n = x.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  const std::uint64_t x_ties = tied_pairs(order.begin(), order.end(),
                                          [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::uint64_t joint_ties =
      tied_pairs(order.begin(), order.end(),
                 [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> buf(n);
  const std::uint64_t swaps = sort_counting_swaps(ys, buf, 0, n);
  const std::uint64_t y_ties =
      tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (x_ties == total || y_ties == total) throw PreconditionError("kendall_tau: all values tied");

  // concordant - discordant = total - x_ties - y_ties + joint_ties - 2 * swaps
  const double numerator = static_cast<double>(total) - static_cast<double>(x_ties) -
                           static_cast<double>(y_ties) + static_cast<double>(joint_ties) -
                           2.0 * static_cast<double>(swaps);
  const double denominator =
      std::sqrt(static_cast<double>(total - x_ties) * static_cast<double>(total - y_ties));
  return std::clamp(numerator / denominator, -1.0, 1.0);
}

}  // namespace poolsim
