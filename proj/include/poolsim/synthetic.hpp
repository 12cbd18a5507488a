#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "poolsim/trec_io.hpp"

namespace poolsim {

/// Parameters of a seeded synthetic pooling dataset.
///
/// "Easy" queries get many planted relevant documents and peaked retrieval
/// scores; "hard" queries get few relevant documents and flat scores. The
/// judgments are exactly the depth-`judged_depth` pool of all runs, so a
/// constant-depth pool at that depth reproduces them.
struct SyntheticSpec {
  std::size_t systems = 20;
  std::size_t queries = 50;
  std::size_t documents = 5000;
  std::size_t run_depth = 100;
  std::size_t judged_depth = 100;
  double easy_fraction = 0.5;
  /// Grade assigned to planted relevant documents that get judged.
  int relevant_grade = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticDataset {
  std::vector<SystemRun> runs;
  JudgmentSet qrels;
  QuerySet queries;
  TermStatistics term_stats;
  /// Per query id (in QuerySet order): true when planted as easy.
  std::vector<bool> easy;
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

/// Writes runs/<tag>.run, qrels.txt, queries.tsv and term_stats.txt under `dir`.
void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace poolsim
