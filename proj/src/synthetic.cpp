#include "poolsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include <fmt/format.h>

#include "poolsim/error.hpp"

namespace poolsim {

namespace {

// mt19937_64 output is fully specified by the standard; the distributions are
// not, so they are derived here to keep datasets identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  double normal() {
    if (spare_) {
      double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::string doc_name(std::size_t i) { return fmt::format("D{:05d}", i); }

constexpr std::size_t kVocabulary = 400;

}  // namespace

void SyntheticSpec::validate() const {
  if (systems < 2) throw PreconditionError("synthetic: need at least 2 systems");
  if (queries < 1) throw PreconditionError("synthetic: need at least 1 query");
  if (run_depth < 1 || judged_depth < 1) throw PreconditionError("synthetic: depths must be >= 1");
  if (documents < run_depth * 2) {
    throw PreconditionError("synthetic: documents must be at least twice the run depth");
  }
  if (!(easy_fraction >= 0.0 && easy_fraction <= 1.0)) {
    throw PreconditionError("synthetic: easy fraction must lie in [0, 1]");
  }
  if (relevant_grade < 1) throw PreconditionError("synthetic: relevant grade must be >= 1");
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticDataset data;

  // Collection statistics for a small vocabulary. Term idf stays within a
  // band so that query wording does not swamp the score-spread signal.
  data.term_stats.doc_count = spec.documents;
  const double log_n = std::log(static_cast<double>(spec.documents));
  for (std::size_t t = 0; t < kVocabulary; ++t) {
    auto df = static_cast<std::uint64_t>(std::exp(log_n - rng.uniform(0.4, 0.6) * log_n));
    df = std::clamp<std::uint64_t>(df, 1, spec.documents);
    data.term_stats.doc_freq.emplace(fmt::format("t{}", t), df);
  }

  std::vector<double> quality(spec.systems);
  std::vector<double> scale(spec.systems);
  for (std::size_t s = 0; s < spec.systems; ++s) {
    quality[s] = rng.uniform(0.4, 1.0);
    scale[s] = rng.uniform(0.5, 2.0);
  }
  data.runs.resize(spec.systems);
  for (std::size_t s = 0; s < spec.systems; ++s) data.runs[s].system_tag = fmt::format("sys{:02d}", s);

  const std::size_t candidates = std::min(spec.documents, spec.run_depth * 3);

  std::map<std::string, std::set<std::string>> relevant;
  for (std::size_t q = 0; q < spec.queries; ++q) {
    const std::string qid = fmt::format("Q{:03d}", q + 1);
    // Spread easy queries evenly through the id range.
    const bool easy = std::floor(static_cast<double>(q + 1) * spec.easy_fraction) >
                      std::floor(static_cast<double>(q) * spec.easy_fraction);
    data.easy.push_back(easy);

    std::vector<std::string> terms;
    const std::size_t n_terms = 2 + rng.index(3);
    for (std::size_t t = 0; t < n_terms; ++t) terms.push_back(fmt::format("t{}", rng.index(kVocabulary)));
    data.queries.queries.emplace(qid, std::move(terms));

    // Candidate documents: planted relevant ones plus distinct non-relevant fillers.
    const std::size_t n_rel = easy ? 30 + rng.index(31) : 2 + rng.index(7);
    std::set<std::size_t> chosen;
    while (chosen.size() < candidates) chosen.insert(rng.index(spec.documents));
    std::vector<std::size_t> pool(chosen.begin(), chosen.end());
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.index(i)]);
    std::vector<bool> is_rel(pool.size(), false);
    std::vector<double> doc_effect(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      is_rel[i] = i < n_rel;
      doc_effect[i] = 0.5 * rng.normal();
      if (is_rel[i]) relevant[qid].insert(doc_name(pool[i]));
    }

    const double signal = easy ? 1.2 : 1.6;
    const double amplitude = easy ? rng.uniform(6.0, 10.0) : rng.uniform(0.3, 0.8);
    const double decay = easy ? rng.uniform(4.0, 10.0) : rng.uniform(30.0, 60.0);
    const double base = rng.uniform(1.0, 5.0);

    for (std::size_t s = 0; s < spec.systems; ++s) {
      std::vector<std::pair<double, std::size_t>> latent;
      latent.reserve(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const double rel_boost = is_rel[i] ? quality[s] * signal : 0.0;
        latent.emplace_back(rel_boost + doc_effect[i] + rng.normal(), i);
      }
      std::sort(latent.begin(), latent.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      auto& docs = data.runs[s].rankings[qid];
      for (std::size_t r = 0; r < spec.run_depth; ++r) {
        const double shape = base + amplitude * std::exp(-static_cast<double>(r) / decay);
        // Scores strictly decrease with rank so file order and score order agree.
        const double score = scale[s] * shape - 1e-6 * static_cast<double>(r);
        docs.push_back({doc_name(pool[latent[r].second]), r + 1, score});
      }
    }
  }

  for (auto& run : data.runs) run = canonicalize(std::move(run));

  // Judge exactly the depth-judged_depth pool.
  data.qrels = JudgmentSet("full");
  for (const auto& run : data.runs) {
    for (const auto& [qid, docs] : run.rankings) {
      const auto& rel = relevant[qid];
      const std::size_t n = std::min(spec.judged_depth, docs.size());
      for (std::size_t i = 0; i < n; ++i) {
        data.qrels.add(qid, docs[i].doc_id, rel.count(docs[i].doc_id) ? spec.relevant_grade : 0);
      }
    }
  }
  return data;
}

void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "runs");
  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << text;
  };
  for (const auto& run : data.runs) write(dir / "runs" / (run.system_tag + ".run"), write_run(run));
  write(dir / "qrels.txt", write_qrels(data.qrels));

  std::string queries;
  for (const auto& [qid, terms] : data.queries.queries) {
    queries += qid + "\t";
    for (std::size_t i = 0; i < terms.size(); ++i) queries += (i ? " " : "") + terms[i];
    queries += "\n";
  }
  write(dir / "queries.tsv", queries);

  std::string stats = fmt::format("N {}\n", data.term_stats.doc_count);
  for (const auto& [term, df] : data.term_stats.doc_freq) stats += fmt::format("{} {}\n", term, df);
  write(dir / "term_stats.txt", stats);
}

}  // namespace poolsim
