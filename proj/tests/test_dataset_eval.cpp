#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "navprompt/dataset_eval.hpp"
#include "test_util.hpp"

using namespace navprompt;
using testutil::line_graph;

namespace {

/// Exponential brute-force LCS: enumerate every subsequence of `a` and keep
/// the longest that is also a subsequence of `b`.
bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& haystack) {
  std::size_t i = 0;
  for (const std::string& tok : haystack) {
    if (i < needle.size() && needle[i] == tok) ++i;
  }
  return i == needle.size();
}

std::size_t brute_force_lcs(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::size_t mask = 0; mask < (1ull << n); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ull << i)) sub.push_back(a[i]);
    }
    if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
  }
  return best;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t len,
                                       int alphabet) {
  static const std::vector<std::string> symbols = {"a", "b", "c", "d", "e"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(symbols[rng() % static_cast<std::size_t>(alphabet)]);
  }
  return out;
}

}  // namespace

TEST_CASE("fuzzy similarity examples", "[dataset]") {
  REQUIRE(fuzzy_similarity("wicker chair", "wicker chair") == 1.0);
  REQUIRE_THAT(fuzzy_similarity("chair", "chairs"),
               Catch::Matchers::WithinAbs(1.0 - 1.0 / 6.0, 1e-12));
  REQUIRE(fuzzy_similarity("", "sofa") == 0.0);
  REQUIRE(fuzzy_similarity("", "") == 1.0);
}

TEST_CASE("fuzzy similarity is symmetric and bounded", "[dataset]") {
  const std::vector<std::string> words = {"",        "sofa", "sofas", "armchair",
                                          "kitchen", "a",    "table lamp"};
  for (const std::string& a : words) {
    for (const std::string& b : words) {
      const double ab = fuzzy_similarity(a, b);
      REQUIRE(ab == fuzzy_similarity(b, a));
      REQUIRE(ab >= 0.0);
      REQUIRE(ab <= 1.0);
    }
  }
}

TEST_CASE("edit distance spot checks", "[dataset]") {
  REQUIRE(detail::edit_distance("kitten", "sitting") == 3);
  REQUIRE(detail::edit_distance("", "abc") == 3);
  REQUIRE(detail::edit_distance("abc", "abc") == 0);
  REQUIRE(detail::edit_distance("flaw", "lawn") == 2);
}

TEST_CASE("rouge_l worked examples", "[dataset]") {
  SECTION("identical phrases") {
    const RougeScore r = rouge_l({"blue", "chair"}, {"blue", "chair"});
    REQUIRE(r.precision == 1.0);
    REQUIRE(r.recall == 1.0);
    REQUIRE(r.f1 == 1.0);
  }
  SECTION("extra leading token") {
    const RougeScore r = rouge_l({"the", "blue", "chair"}, {"blue", "chair"});
    REQUIRE_THAT(r.precision, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    REQUIRE(r.recall == 1.0);
    REQUIRE_THAT(r.f1, Catch::Matchers::WithinAbs(0.8, 1e-12));
  }
  SECTION("disjoint token sets") {
    const RougeScore r = rouge_l({"a", "b"}, {"c", "d"});
    REQUIRE(r.precision == 0.0);
    REQUIRE(r.recall == 0.0);
    REQUIRE(r.f1 == 0.0);
  }
  SECTION("empty sides") {
    const RougeScore both = rouge_l({}, {});
    REQUIRE(both.f1 == 1.0);
    const RougeScore one = rouge_l({}, {"a"});
    REQUIRE(one.precision == 0.0);
    REQUIRE(one.recall == 0.0);
    REQUIRE(one.f1 == 0.0);
  }
}

TEST_CASE("rouge_l equals exponential brute force on short lists", "[dataset]") {
  std::mt19937_64 rng(246);
  for (int iter = 0; iter < 400; ++iter) {
    const std::size_t la = rng() % 9;
    const std::size_t lb = rng() % 9;
    const std::vector<std::string> a = random_tokens(rng, la, 3);
    const std::vector<std::string> b = random_tokens(rng, lb, 3);
    const std::size_t lcs = brute_force_lcs(a, b);
    REQUIRE(detail::lcs_length(a, b) == lcs);

    const RougeScore r = rouge_l(a, b);
    if (a.empty() && b.empty()) {
      REQUIRE(r.f1 == 1.0);
    } else if (a.empty() || b.empty()) {
      REQUIRE(r.f1 == 0.0);
    } else {
      REQUIRE(r.precision == static_cast<double>(lcs) / static_cast<double>(a.size()));
      REQUIRE(r.recall == static_cast<double>(lcs) / static_cast<double>(b.size()));
    }
  }
}

TEST_CASE("rouge F-measure is symmetric for equal-length operands", "[dataset]") {
  std::mt19937_64 rng(135);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t len = 1 + rng() % 6;
    const std::vector<std::string> a = random_tokens(rng, len, 3);
    const std::vector<std::string> b = random_tokens(rng, len, 3);
    REQUIRE(rouge_l(a, b).f1 == rouge_l(b, a).f1);
  }
}

TEST_CASE("phrase_set_prf on identical sets is perfect", "[dataset]") {
  const std::vector<std::string> phrases = {"blue chair", "wooden table", "rug"};
  for (const PhraseScorer scorer : {PhraseScorer::Fuzzy, PhraseScorer::RougeL}) {
    const double threshold = scorer == PhraseScorer::Fuzzy ? kDefaultFuzzyThreshold
                                                           : kDefaultRougeThreshold;
    const PhraseMatchReport r = phrase_set_prf(phrases, phrases, scorer, threshold);
    REQUIRE(r.precision == 1.0);
    REQUIRE(r.recall == 1.0);
    REQUIRE(r.f1 == 1.0);
    REQUIRE(r.hits == 3);
  }
}

TEST_CASE("phrase_set_prf with one spurious prediction", "[dataset]") {
  const std::vector<std::string> gold = {"blue chair", "wooden table", "lamp", "rug"};
  std::vector<std::string> pred = gold;
  pred.push_back("completely different thing");
  const PhraseMatchReport r =
      phrase_set_prf(pred, gold, PhraseScorer::Fuzzy, kDefaultFuzzyThreshold);
  REQUIRE_THAT(r.precision, Catch::Matchers::WithinAbs(0.8, 1e-12));
  REQUIRE(r.recall == 1.0);
  REQUIRE_THAT(r.f1, Catch::Matchers::WithinAbs(8.0 / 9.0, 1e-12));
}

TEST_CASE("phrase_set_prf empty-side conventions", "[dataset]") {
  const PhraseMatchReport both =
      phrase_set_prf({}, {}, PhraseScorer::Fuzzy, kDefaultFuzzyThreshold);
  REQUIRE(both.precision == 1.0);
  REQUIRE(both.recall == 1.0);
  REQUIRE(both.f1 == 1.0);

  const PhraseMatchReport none =
      phrase_set_prf({}, {"sofa"}, PhraseScorer::Fuzzy, kDefaultFuzzyThreshold);
  REQUIRE(none.precision == 0.0);
  REQUIRE(none.recall == 0.0);
  REQUIRE(none.f1 == 0.0);
}

TEST_CASE("phrase matching is one-to-one", "[dataset]") {
  // Two near-identical predictions cannot both claim the single gold phrase.
  const PhraseMatchReport r = phrase_set_prf({"blue chair", "blue chairs"},
                                             {"blue chair"}, PhraseScorer::Fuzzy,
                                             kDefaultFuzzyThreshold);
  REQUIRE(r.hits == 1);
  REQUIRE(r.precision == 0.5);
  REQUIRE(r.recall == 1.0);
}

TEST_CASE("prf counts are consistent integers", "[dataset]") {
  std::mt19937_64 rng(8675309);
  const std::vector<std::string> vocab = {"blue chair", "wooden table", "rug",
                                          "lamp",       "sofa",         "doorway",
                                          "mirror",     "plant"};
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::string> pred, gold;
    for (const std::string& w : vocab) {
      if (rng() % 2) pred.push_back(w);
      if (rng() % 2) gold.push_back(w);
    }
    const PhraseMatchReport r =
        phrase_set_prf(pred, gold, PhraseScorer::Fuzzy, kDefaultFuzzyThreshold);
    if (!pred.empty()) {
      const double scaled = r.precision * static_cast<double>(pred.size());
      REQUIRE_THAT(scaled, Catch::Matchers::WithinAbs(
                               static_cast<double>(r.hits), 1e-9));
    }
    if (!gold.empty()) {
      const double scaled = r.recall * static_cast<double>(gold.size());
      REQUIRE_THAT(scaled, Catch::Matchers::WithinAbs(
                               static_cast<double>(r.hits), 1e-9));
    }
    REQUIRE(r.hits <= std::min(pred.size(), gold.size()));
  }
}

TEST_CASE("viewpoint accuracy all-exact fixture", "[dataset]") {
  const NavGraph g = line_graph();
  const ViewpointReport r =
      viewpoint_accuracy({"A", "B", "C"}, {"A", "B", "C"}, g);
  REQUIRE(r.matching == 1.0);
  REQUIRE(r.neighboring == 1.0);
  REQUIRE(r.pairs == 3);
}

TEST_CASE("viewpoint accuracy all-adjacent fixture", "[dataset]") {
  const NavGraph g = line_graph();
  const ViewpointReport r =
      viewpoint_accuracy({"B", "C", "D"}, {"A", "B", "C"}, g);
  REQUIRE(r.matching == 0.0);
  REQUIRE(r.neighboring == 1.0);
}

TEST_CASE("viewpoint accuracy mixed fixture", "[dataset]") {
  const NavGraph g = line_graph();
  // A/A exact, B/C adjacent, C/C exact, E/B two hops apart.
  const ViewpointReport r =
      viewpoint_accuracy({"A", "B", "C", "E"}, {"A", "C", "C", "B"}, g);
  REQUIRE(r.matching == 0.5);
  REQUIRE(r.neighboring == 0.75);
}

TEST_CASE("viewpoint accuracy rejects bad input", "[dataset]") {
  const NavGraph g = line_graph();
  REQUIRE_THROWS_AS(viewpoint_accuracy({"A"}, {"A", "B"}, g), Error);
  REQUIRE_THROWS_AS(viewpoint_accuracy({"A", "zz"}, {"A", "B"}, g), UnknownNode);
  REQUIRE_THROWS_AS(viewpoint_accuracy({"A", "B"}, {"A", "zz"}, g), UnknownNode);
}

TEST_CASE("neighboring never drops below matching", "[dataset]") {
  const NavGraph g = line_graph();
  std::mt19937_64 rng(4004);
  const std::vector<std::string> nodes = {"A", "B", "C", "D", "E", "F"};
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::string> sel, gold;
    const std::size_t n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      sel.push_back(nodes[rng() % nodes.size()]);
      gold.push_back(nodes[rng() % nodes.size()]);
    }
    const ViewpointReport r = viewpoint_accuracy(sel, gold, g);
    REQUIRE(r.neighboring >= r.matching);
  }
}

TEST_CASE("split_tokens splits on whitespace runs", "[dataset]") {
  REQUIRE(split_tokens("the blue  chair") ==
          std::vector<std::string>{"the", "blue", "chair"});
  REQUIRE(split_tokens("") == std::vector<std::string>{});
  REQUIRE(split_tokens("  sofa ") == std::vector<std::string>{"sofa"});
}
