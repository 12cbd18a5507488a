#include "poolsim/trec_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "poolsim/error.hpp"

namespace poolsim {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Calls fn(line_number, line) for every line, with any trailing '\r' removed.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line_no, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i == line.size()) break;
    auto start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), is_space);
}

template <typename T>
std::optional<T> parse_number(std::string_view field) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

bool canonical_less(const RankedDoc& a, const RankedDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

}  // namespace

const std::vector<RankedDoc>* SystemRun::find(std::string_view query_id) const {
  auto it = rankings.find(std::string(query_id));
  return it == rankings.end() ? nullptr : &it->second;
}

SystemRun canonicalize(SystemRun run) {
  for (auto& [qid, docs] : run.rankings) {
    std::sort(docs.begin(), docs.end(), canonical_less);
    for (std::size_t i = 0; i < docs.size(); ++i) docs[i].rank = i + 1;
  }
  return run;
}

bool JudgmentSet::add(const std::string& query_id, const std::string& doc_id, int grade) {
  if (grade < 0) {
    throw ValidationError(
        fmt::format("negative grade {} for ({}, {})", grade, query_id, doc_id));
  }
  auto& q = grades_[query_id];
  auto [it, inserted] = q.emplace(doc_id, grade);
  if (!inserted) {
    if (it->second != grade) {
      throw ValidationError(fmt::format("conflicting grades {} and {} for ({}, {})", it->second,
                                        grade, query_id, doc_id));
    }
    return false;
  }
  ++size_;
  return true;
}

std::optional<int> JudgmentSet::grade(std::string_view query_id, std::string_view doc_id) const {
  auto q = grades_.find(query_id);
  if (q == grades_.end()) return std::nullopt;
  auto d = q->second.find(doc_id);
  if (d == q->second.end()) return std::nullopt;
  return d->second;
}

std::size_t JudgmentSet::relevant_count(std::string_view query_id, int threshold) const {
  auto q = grades_.find(query_id);
  if (q == grades_.end()) return 0;
  return static_cast<std::size_t>(std::count_if(
      q->second.begin(), q->second.end(), [&](const auto& kv) { return kv.second >= threshold; }));
}

std::size_t JudgmentSet::total_relevant(int threshold) const {
  std::size_t total = 0;
  for (const auto& [qid, docs] : grades_) total += relevant_count(qid, threshold);
  return total;
}

const std::vector<std::string>* QuerySet::find(std::string_view query_id) const {
  auto it = queries.find(query_id);
  return it == queries.end() ? nullptr : &it->second;
}

std::optional<std::uint64_t> TermStatistics::df(std::string_view term) const {
  auto it = doc_freq.find(term);
  if (it == doc_freq.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    bool word = c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                (c >= 'A' && c <= 'Z');
    if (word) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

SystemRun parse_run(std::string_view text, Diagnostics* diag) {
  SystemRun run;
  std::set<std::pair<std::string, std::string>, std::less<>> seen;
  std::set<std::string> tags;
  bool have_tag = false;

  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    auto fields = split_fields(line);
    if (fields.size() != 6) {
      throw ParseError(line_no, fmt::format("expected 6 fields, found {}", fields.size()));
    }
    auto rank = parse_number<long long>(fields[3]);
    if (!rank) throw ParseError(line_no, fmt::format("unparsable rank '{}'", fields[3]));
    auto score = parse_number<double>(fields[4]);
    if (!score) throw ParseError(line_no, fmt::format("unparsable score '{}'", fields[4]));
    if (!std::isfinite(*score)) {
      throw ParseError(line_no, fmt::format("non-finite score '{}'", fields[4]));
    }

    std::string qid(fields[0]);
    std::string docid(fields[2]);
    if (!seen.emplace(qid, docid).second) {
      throw ValidationError(
          fmt::format("line {}: duplicate document {} for query {}", line_no, docid, qid));
    }
    if (!have_tag) {
      run.system_tag = std::string(fields[5]);
      have_tag = true;
    }
    tags.emplace(fields[5]);

    run.rankings[qid].push_back(
        {std::move(docid), static_cast<std::size_t>(std::max(*rank, 0LL)), *score});
  });

  if (run.rankings.empty()) throw ValidationError("run contains no entries");

  // Compare the file's rank column against canonical positions before rewriting it.
  std::size_t inconsistent = 0;
  for (auto& [qid, docs] : run.rankings) {
    std::sort(docs.begin(), docs.end(), canonical_less);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (docs[i].rank != i + 1) {
        ++inconsistent;
        break;
      }
    }
  }
  run = canonicalize(std::move(run));

  if (diag) {
    if (tags.size() > 1) {
      diag->warn(fmt::format("run {} mixes {} tags; using the first", run.system_tag, tags.size()));
    }
    if (inconsistent > 0) {
      diag->warn(fmt::format("run {}: rank column disagrees with score order for {} queries",
                             run.system_tag, inconsistent));
    }
  }
  return run;
}

JudgmentSet parse_qrels(std::string_view text, Diagnostics* diag) {
  JudgmentSet judgments("full");
  std::size_t duplicates = 0;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, fmt::format("expected 4 fields, found {}", fields.size()));
    }
    auto grade = parse_number<int>(fields[3]);
    if (!grade) throw ParseError(line_no, fmt::format("unparsable grade '{}'", fields[3]));
    try {
      if (!judgments.add(std::string(fields[0]), std::string(fields[2]), *grade)) ++duplicates;
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("line {}: {}", line_no, e.what()));
    }
  });
  if (diag) {
    if (judgments.empty()) diag->warn("qrels input is empty");
    if (duplicates > 0) diag->warn(fmt::format("{} repeated identical judgments ignored", duplicates));
  }
  return judgments;
}

QuerySet parse_queries(std::string_view text) {
  QuerySet set;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(line_no, "expected <qid><TAB><text>");
    auto fields = split_fields(line.substr(0, tab));
    if (fields.size() != 1) throw ParseError(line_no, "query id must be a single token");
    std::string qid(fields[0]);
    auto tokens = tokenize(line.substr(tab + 1));
    if (tokens.empty()) {
      throw ValidationError(fmt::format("line {}: query {} has empty text", line_no, qid));
    }
    if (!set.queries.emplace(qid, std::move(tokens)).second) {
      throw ValidationError(fmt::format("line {}: duplicate query id {}", line_no, qid));
    }
  });
  return set;
}

TermStatistics parse_term_stats(std::string_view text) {
  TermStatistics stats;
  bool have_header = false;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw ParseError(line_no, fmt::format("expected 2 fields, found {}", fields.size()));
    }
    if (!have_header) {
      if (fields[0] != "N") throw ParseError(line_no, "missing 'N <doc_count>' header");
      auto n = parse_number<std::uint64_t>(fields[1]);
      if (!n) throw ParseError(line_no, fmt::format("unparsable document count '{}'", fields[1]));
      if (*n == 0) throw ValidationError("document count must be positive");
      stats.doc_count = *n;
      have_header = true;
      return;
    }
    auto df = parse_number<std::uint64_t>(fields[1]);
    if (!df) throw ParseError(line_no, fmt::format("unparsable df '{}'", fields[1]));
    auto tokens = tokenize(fields[0]);
    if (tokens.size() != 1) {
      throw ValidationError(fmt::format("line {}: '{}' is not a single term", line_no, fields[0]));
    }
    if (*df == 0 || *df > stats.doc_count) {
      throw ValidationError(fmt::format("line {}: df {} of '{}' outside [1, {}]", line_no, *df,
                                        tokens[0], stats.doc_count));
    }
    if (!stats.doc_freq.emplace(tokens[0], *df).second) {
      throw ValidationError(fmt::format("line {}: duplicate term '{}'", line_no, tokens[0]));
    }
  });
  if (!have_header) throw ParseError(1, "missing 'N <doc_count>' header");
  return stats;
}

std::string write_run(const SystemRun& run) {
  std::string out;
  for (const auto& [qid, docs] : run.rankings) {
    for (const auto& d : docs) {
      out += fmt::format("{} Q0 {} {} {} {}\n", qid, d.doc_id, d.rank, d.score, run.system_tag);
    }
  }
  return out;
}

std::string write_qrels(const JudgmentSet& judgments) {
  std::string out;
  for (const auto& [qid, docs] : judgments.by_query()) {
    for (const auto& [docid, grade] : docs) {
      out += fmt::format("{} 0 {} {}\n", qid, docid, grade);
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<SystemRun> load_runs(const std::filesystem::path& dir, Diagnostics* diag) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(fmt::format("{}: not a directory", dir.string()));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError(fmt::format("{}: no run files", dir.string()));

  std::vector<SystemRun> runs;
  std::set<std::string> tags;
  for (const auto& file : files) {
    try {
      runs.push_back(parse_run(read_file(file), diag));
    } catch (const ParseError& e) {
      throw ParseError(e.line(), e.detail(), file.string());
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}: {}", file.string(), e.what()));
    }
    if (!tags.insert(runs.back().system_tag).second) {
      throw ValidationError(
          fmt::format("{}: duplicate system tag {}", file.string(), runs.back().system_tag));
    }
  }
  return runs;
}

}  // namespace poolsim
