#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poolsim/diagnostics.hpp"

namespace poolsim {

struct RankedDoc {
  std::string doc_id;
  std::size_t rank = 0;
  double score = 0.0;

  friend bool operator==(const RankedDoc&, const RankedDoc&) = default;
};

/// One retrieval system's ranked lists, keyed by query id.
///
/// Lists produced by the parser are canonical: sorted by descending score with
/// ascending doc id as tie-break, ranks rewritten to 1..n. The rank column of
/// the input file is never trusted.
struct SystemRun {
  std::string system_tag;
  std::map<std::string, std::vector<RankedDoc>> rankings;

  const std::vector<RankedDoc>* find(std::string_view query_id) const;

  friend bool operator==(const SystemRun&, const SystemRun&) = default;
};

/// Sort every ranking into canonical order and rewrite ranks to 1..n.
SystemRun canonicalize(SystemRun run);

/// Graded relevance judgments. Grades are non-negative; each (query, doc)
/// pair appears at most once.
class JudgmentSet {
 public:
  using QueryGrades = std::map<std::string, int, std::less<>>;

  JudgmentSet() = default;
  explicit JudgmentSet(std::string provenance) : provenance_(std::move(provenance)) {}

  /// Insert a judgment. Throws ValidationError on a negative grade or on a
  /// conflicting grade for an existing pair; an identical duplicate is a no-op
  /// and returns false.
  bool add(const std::string& query_id, const std::string& doc_id, int grade);

  std::optional<int> grade(std::string_view query_id, std::string_view doc_id) const;

  /// Number of judged documents for the query with grade >= threshold.
  std::size_t relevant_count(std::string_view query_id, int threshold) const;
  /// Relevant documents summed over all queries.
  std::size_t total_relevant(int threshold) const;

  const std::map<std::string, QueryGrades, std::less<>>& by_query() const noexcept {
    return grades_;
  }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  /// Grade maps are equal; provenance is ignored.
  bool same_grades(const JudgmentSet& other) const { return grades_ == other.grades_; }

  friend bool operator==(const JudgmentSet&, const JudgmentSet&) = default;

 private:
  std::map<std::string, QueryGrades, std::less<>> grades_;
  std::size_t size_ = 0;
  std::string provenance_ = "full";
};

struct QuerySet {
  std::map<std::string, std::vector<std::string>, std::less<>> queries;

  const std::vector<std::string>* find(std::string_view query_id) const;
};

struct TermStatistics {
  std::uint64_t doc_count = 0;
  std::map<std::string, std::uint64_t, std::less<>> doc_freq;

  std::optional<std::uint64_t> df(std::string_view term) const;
};

/// Lowercase ASCII letters and split on runs of ASCII characters that are not
/// letters or digits. Bytes >= 0x80 are kept so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

/// `qid Q0 docid rank score tag`, whitespace separated.
SystemRun parse_run(std::string_view text, Diagnostics* diag = nullptr);
/// `qid iter docid grade`. Provenance of the result is "full".
JudgmentSet parse_qrels(std::string_view text, Diagnostics* diag = nullptr);
/// `qid<TAB>query text`.
QuerySet parse_queries(std::string_view text);
/// `N <doc_count>` header followed by `term df` lines.
TermStatistics parse_term_stats(std::string_view text);

/// Canonical order, `Q0` in the second column, scores in shortest round-trip form.
std::string write_run(const SystemRun& run);

/// Sorted by query id then doc id, iter column emitted as 0.
std::string write_qrels(const JudgmentSet& judgments);

std::string read_file(const std::filesystem::path& path);

/// Parse every regular file in `dir` as one run, ordered by file name.
/// Throws ValidationError if the directory holds no runs or two runs share a tag.
std::vector<SystemRun> load_runs(const std::filesystem::path& dir, Diagnostics* diag = nullptr);

}  // namespace poolsim
