#include <random>

#include <gtest/gtest.h>

#include "poolsim/error.hpp"
#include "poolsim/trec_io.hpp"

namespace poolsim {
namespace {

TEST(ParseRun, AlreadyCanonical) {
  auto run = parse_run("q1 Q0 dA 1 9.5 sysX\nq1 Q0 dB 2 7.0 sysX");
  EXPECT_EQ(run.system_tag, "sysX");
  ASSERT_EQ(run.rankings.size(), 1u);
  const auto& docs = run.rankings.at("q1");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0], (RankedDoc{"dA", 1, 9.5}));
  EXPECT_EQ(docs[1], (RankedDoc{"dB", 2, 7.0}));
}

TEST(ParseRun, TieBrokenByDocId) {
  auto run = parse_run("q1 Q0 dB 1 9.0 s\nq1 Q0 dA 2 9.0 s\n");
  const auto& docs = run.rankings.at("q1");
  EXPECT_EQ(docs[0], (RankedDoc{"dA", 1, 9.0}));
  EXPECT_EQ(docs[1], (RankedDoc{"dB", 2, 9.0}));
}

TEST(ParseRun, ReordersByScoreAndWarnsOnRankColumn) {
  Diagnostics diag;
  auto run = parse_run("q1 Q0 low 1 1.0 s\nq1 Q0 high 2 5.0 s\n\n  \nq2 Q0 x 1 3 s\n", &diag);
  const auto& docs = run.rankings.at("q1");
  EXPECT_EQ(docs[0].doc_id, "high");
  EXPECT_EQ(docs[0].rank, 1u);
  EXPECT_EQ(docs[1].doc_id, "low");
  EXPECT_EQ(docs[1].rank, 2u);
  ASSERT_EQ(diag.warnings().size(), 1u);
  EXPECT_NE(diag.warnings()[0].find("rank column"), std::string::npos);
}

TEST(ParseRun, UnparsableRankIsParseErrorAtLine) {
  try {
    parse_run("q1 Q0 dA one 9.5 sysX");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(ParseRun, MalformedLines) {
  EXPECT_THROW(parse_run("q1 Q0 dA 1 9.5"), ParseError);
  EXPECT_THROW(parse_run("q1 Q0 dA 1 abc s"), ParseError);
  EXPECT_THROW(parse_run("q1 Q0 dA 1 nan s"), ParseError);
  EXPECT_THROW(parse_run("q1 Q0 dA 1 inf s"), ParseError);
  try {
    parse_run("q1 Q0 dA 1 2 s\nq1 Q0 dB 2 1 s\nq1 Q0 dC 3 x s\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseRun, DuplicateAndEmptyAreValidationErrors) {
  EXPECT_THROW(parse_run("q1 Q0 dA 1 2 s\nq1 Q0 dA 2 1 s"), ValidationError);
  EXPECT_THROW(parse_run(""), ValidationError);
  EXPECT_THROW(parse_run("\n \n"), ValidationError);
}

TEST(ParseRun, MixedTagsKeepFirst) {
  Diagnostics diag;
  auto run = parse_run("q1 Q0 a 1 2 first\nq1 Q0 b 2 1 second\n", &diag);
  EXPECT_EQ(run.system_tag, "first");
  EXPECT_FALSE(diag.empty());
}

TEST(Canonicalize, IdempotentAndContiguous) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    SystemRun run{"s", {}};
    std::uniform_int_distribution<int> n_docs(1, 15), score(0, 4);
    for (int q = 0; q < 3; ++q) {
      auto& docs = run.rankings["q" + std::to_string(q)];
      int n = n_docs(rng);
      for (int d = 0; d < n; ++d) {
        docs.push_back({"d" + std::to_string(d), static_cast<std::size_t>(n - d), double(score(rng))});
      }
      std::shuffle(docs.begin(), docs.end(), rng);
    }
    auto once = canonicalize(run);
    EXPECT_EQ(canonicalize(once), once);
    for (const auto& [qid, docs] : once.rankings) {
      for (std::size_t i = 0; i < docs.size(); ++i) {
        EXPECT_EQ(docs[i].rank, i + 1);
        if (i > 0) {
          EXPECT_TRUE(docs[i - 1].score > docs[i].score ||
                      (docs[i - 1].score == docs[i].score && docs[i - 1].doc_id < docs[i].doc_id));
        }
      }
    }
    EXPECT_EQ(parse_run(write_run(once)), once);
  }
}

TEST(ParseQrels, Basic) {
  auto j = parse_qrels("q1 0 dA 2\nq1 0 dB 0");
  EXPECT_EQ(j.size(), 2u);
  EXPECT_EQ(j.grade("q1", "dA"), 2);
  EXPECT_EQ(j.grade("q1", "dB"), 0);
  EXPECT_EQ(j.grade("q1", "dC"), std::nullopt);
  EXPECT_EQ(j.provenance(), "full");
  EXPECT_EQ(j.relevant_count("q1", 1), 1u);
  EXPECT_EQ(j.relevant_count("q1", 3), 0u);
}

TEST(ParseQrels, Errors) {
  EXPECT_THROW(parse_qrels("q1 0 dA 2\nq1 0 dA 1"), ValidationError);
  EXPECT_THROW(parse_qrels("q1 0 dA -1"), ValidationError);
  EXPECT_THROW(parse_qrels("q1 0 dA"), ParseError);
  EXPECT_THROW(parse_qrels("q1 0 dA 1.5"), ParseError);
  Diagnostics diag;
  EXPECT_NO_THROW(parse_qrels("q1 0 dA 1\nq1 0 dA 1", &diag));
  EXPECT_FALSE(diag.empty());
}

TEST(ParseQrels, EmptyInputWarns) {
  Diagnostics diag;
  auto j = parse_qrels("", &diag);
  EXPECT_TRUE(j.empty());
  EXPECT_EQ(diag.warnings().size(), 1u);
}

TEST(WriteQrels, Format) {
  JudgmentSet j;
  j.add("q1", "dA", 2);
  EXPECT_EQ(write_qrels(j), "q1 0 dA 2\n");
  EXPECT_EQ(write_qrels(JudgmentSet{}), "");
}

TEST(WriteQrels, RoundTripProperty) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> nq(0, 5), nd(0, 20), grade(0, 3);
  for (int trial = 0; trial < 300; ++trial) {
    JudgmentSet j("full");
    int queries = nq(rng);
    for (int q = 0; q < queries; ++q) {
      int docs = nd(rng);
      for (int d = 0; d < docs; ++d) {
        auto qid = "q" + std::to_string(q * 7);
        auto docid = "doc" + std::to_string(nd(rng) * 13);
        if (!j.grade(qid, docid)) j.add(qid, docid, grade(rng));
      }
    }
    EXPECT_EQ(parse_qrels(write_qrels(j)), j);
  }
}

TEST(ParseQueries, Tokenizes) {
  auto q = parse_queries("q1\tdeep learning track\nq2\tIR?! eval\n");
  EXPECT_EQ(q.queries.at("q1"), (std::vector<std::string>{"deep", "learning", "track"}));
  EXPECT_EQ(q.queries.at("q2"), (std::vector<std::string>{"ir", "eval"}));
}

TEST(ParseQueries, Errors) {
  EXPECT_THROW(parse_queries("q1\t"), ValidationError);
  EXPECT_THROW(parse_queries("q1\t?!"), ValidationError);
  EXPECT_THROW(parse_queries("q1\ta\nq1\tb"), ValidationError);
  EXPECT_THROW(parse_queries("q1 no tab"), ParseError);
}

TEST(Tokenize, KeepsUtf8AndDigits) {
  EXPECT_EQ(tokenize("Caf\xc3\xa9 COVID-19"),
            (std::vector<std::string>{"caf\xc3\xa9", "covid", "19"}));
  EXPECT_TRUE(tokenize(" ,.; ").empty());
}

TEST(ParseTermStats, Basic) {
  auto s = parse_term_stats("N 1000\nLearning 50\n");
  EXPECT_EQ(s.doc_count, 1000u);
  EXPECT_EQ(s.df("learning"), 50u);
  EXPECT_EQ(s.df("missing"), std::nullopt);
}

TEST(ParseTermStats, Errors) {
  EXPECT_THROW(parse_term_stats("N 10\nx 11"), ValidationError);
  EXPECT_THROW(parse_term_stats("N 10\nx 0"), ValidationError);
  EXPECT_THROW(parse_term_stats("N 10\nx 1\nx 2"), ValidationError);
  EXPECT_THROW(parse_term_stats("learning 50"), ParseError);
  EXPECT_THROW(parse_term_stats(""), ParseError);
  EXPECT_THROW(parse_term_stats("N ten"), ParseError);
}

}  // namespace
}  // namespace poolsim
