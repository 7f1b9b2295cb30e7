#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "eval/metrics.hpp"
#include "eval/permutation.hpp"
#include "support/fixtures.hpp"

using namespace gradphon;
using gradphon::testing::random_params;

namespace {

// Full (n+1) x (m+1) table, kept separate from the two-row implementation.
std::size_t reference_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) t[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) t[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = std::min({t[i - 1][j] + 1, t[i][j - 1] + 1, t[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    }
  }
  return t[a.size()][b.size()];
}

std::string random_word(Rng& rng, std::size_t max_len, const std::string& letters = "abcd") {
  std::string s(rng.below(max_len + 1), ' ');
  for (char& c : s) c = letters[rng.below(letters.size())];
  return s;
}

// A checkpoint together with forms that it decodes exactly: the gold forms
// are its own greedy outputs.
std::pair<Checkpoint, Corpus> self_consistent_model(std::uint64_t seed) {
  Alphabet alphabet({"a", "b", "c"});
  MorphemeVocab vocab({"p", "q", "r", "s"});
  auto params = random_params({.dim = 4, .symbols = 3, .morphemes = 4}, seed, 1.0);
  auto ck = Checkpoint::capture(Variant::PositionDependent, 8, alphabet, vocab, params);
  Corpus forms;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t ms[] = {a, b};
      const auto out = greedy_decode(ck.variant, ms, ck.params, ck.max_decode_len);
      forms.push_back({alphabet.decode(out), {vocab.identifier(a), vocab.identifier(b)}, 1});
    }
  }
  return {ck, forms};
}

}  // namespace

TEST_CASE("levenshtein") {
  CHECK(levenshtein("abc", "abc") == 0);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "") == 3);
  CHECK(reference_distance("kitten", "sitting") == 3);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("flaw", "lawn") == 2);

  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_word(rng, 12), b = random_word(rng, 12), c = random_word(rng, 12);
    CHECK(levenshtein(a, b) == reference_distance(a, b));
    CHECK(levenshtein(a, b) == levenshtein(b, a));
    CHECK((levenshtein(a, b) == 0) == (a == b));
    CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
  }
  const std::vector<std::size_t> x{1, 2, 3}, y{1, 3};
  CHECK(levenshtein<std::size_t>(x, y) == 1);
}

TEST_CASE("surprisal") {
  auto params = random_params({.dim = 3, .symbols = 4, .morphemes = 2}, 2);
  std::fill(params.readout_v.value.begin(), params.readout_v.value.end(), 0.0);
  for (Variant v : {Variant::PositionIndependent, Variant::PositionDependent, Variant::Joint}) {
    for (const LexiconEntry& e : {LexiconEntry{{0}, {}, 1}, LexiconEntry{{0, 1}, {3, 3, 1, 0, 2}, 1}}) {
      CHECK(std::abs(surprisal(v, e, params) - std::log(5.0)) < 1e-10);
    }
  }
  auto p2 = random_params({.dim = 3, .symbols = 4, .morphemes = 2}, 3);
  const LexiconEntry e{{1, 0}, {2, 2}, 1};
  CHECK(surprisal(Variant::Joint, e, p2) == -word_logprob(Variant::Joint, e, p2) / 3.0);
  CHECK(surprisal(Variant::Joint, e, p2) > 0);
}

TEST_CASE("evaluate") {
  auto [ck, forms] = self_consistent_model(4);
  SUBCASE("a perfect predictor") {
    auto r = evaluate(ck, forms);
    CHECK(r.accuracy == 100.0);
    CHECK(r.mean_edit_distance == 0.0);
    CHECK(r.items == forms.size());
    double nll = 0;
    for (const auto& rec : r.records) {
      CHECK(rec.correct);
      CHECK(rec.surprisal >= 0);
      CHECK(std::isfinite(rec.surprisal));
      nll += rec.surprisal;
    }
    CHECK(r.mean_surprisal == doctest::Approx(nll / forms.size()));
  }
  SUBCASE("a predictor that always stops immediately") {
    auto rigged = ck;
    auto& p = rigged.params;
    std::fill(p.lstm_input.value.begin(), p.lstm_input.value.end(), 0.0);
    std::fill(p.lstm_hidden.value.begin(), p.lstm_hidden.value.end(), 0.0);
    std::fill(p.lstm_bias.value.begin(), p.lstm_bias.value.end(), 2.0);
    std::fill(p.readout_w.value.begin(), p.readout_w.value.end(), 0.0);
    p.readout_w.value[0] = 1;
    std::fill(p.readout_v.value.begin(), p.readout_v.value.end(), 0.0);
    p.readout_v.value[3 * 8] = 10;
    Corpus gold{{"abc", {"p", "q"}, 1}, {"a", {"r", "s"}, 1}, {"cc", {"q"}, 1}};
    auto r = evaluate(rigged, gold);
    CHECK(r.accuracy == 0.0);
    CHECK(r.mean_edit_distance == doctest::Approx(2.0));
    for (const auto& rec : r.records) CHECK(rec.predicted.empty());
  }
  SUBCASE("unknown morphemes count as misses and stay out of the NLL") {
    Corpus mixed{forms[0], forms[5], {"abca", {"p", "zzz"}, 1}};
    auto r = evaluate(ck, mixed);
    CHECK(r.unknown_morpheme_items == 1);
    CHECK(r.accuracy == doctest::Approx(200.0 / 3));
    CHECK(r.mean_edit_distance == doctest::Approx(4.0 / 3));
    CHECK(r.records[2].unknown_morpheme);
    CHECK(r.mean_surprisal == doctest::Approx((r.records[0].surprisal + r.records[1].surprisal) / 2));
  }
  SUBCASE("errors") {
    try {
      evaluate(ck, Corpus{{"abx", {"p", "q"}, 1}});
      FAIL("expected a compatibility error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Compatibility);
      CHECK(std::string(e.what()).find('x') != std::string::npos);
    }
    CHECK_THROWS_AS(evaluate(ck, Corpus{}), Error);
  }
  SUBCASE("pure function of checkpoint and test set") {
    Corpus gold{{"abc", {"p", "q"}, 1}, {"ba", {"r", "s"}, 1}, {"cc", {"q", "q"}, 1}, {"a", {"s"}, 1}};
    auto a = evaluate(ck, gold);
    auto b = evaluate(ck, gold);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].predicted == b.records[i].predicted);
      CHECK(a.records[i].surprisal == b.records[i].surprisal);
    }
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.mean_edit_distance == b.mean_edit_distance);
    CHECK(a.mean_surprisal == b.mean_surprisal);
    if (a.accuracy == 100.0) CHECK(a.mean_edit_distance == 0.0);
  }
}

TEST_CASE("summaries") {
  auto s = summarize({3, 5, 7});
  CHECK(s.mean == 5.0);
  CHECK(s.sd == 2.0);
  CHECK(summarize({4, 4}).sd == 0.0);
}

TEST_CASE("paired permutation test") {
  SUBCASE("identical systems") {
    const std::vector<double> a{1, 0, 1, 1, 0, 1};
    CHECK(paired_permutation_test(a, a, 1000, 1) == 1.0);
  }
  SUBCASE("ten pairs all favouring A") {
    const std::vector<double> a(10, 1.0), b(10, 0.0);
    CHECK(paired_permutation_test(a, b, 1000, 1, PermutationMethod::Exact) == doctest::Approx(2.0 / 1024));
    CHECK(paired_permutation_test(a, b, 1000, 1) == doctest::Approx(0.001953125));
  }
  SUBCASE("Monte Carlo agrees with exact enumeration") {
    Rng rng(5);
    for (int fixture = 0; fixture < 5; ++fixture) {
      std::vector<double> a(12), b(12);
      for (std::size_t i = 0; i < 12; ++i) {
        a[i] = rng.normal() + 0.4;
        b[i] = rng.normal();
      }
      const double exact = paired_permutation_test(a, b, 0, 0, PermutationMethod::Exact);
      const double mc = paired_permutation_test(a, b, 100000, 7, PermutationMethod::MonteCarlo);
      CHECK(std::abs(exact - mc) <= 0.01);
      CHECK(mc == paired_permutation_test(a, b, 100000, 7, PermutationMethod::MonteCarlo));
    }
  }
  SUBCASE("errors") {
    const std::vector<double> a{1, 2}, b{1};
    try {
      paired_permutation_test(a, b, 1000, 1);
      FAIL("expected a data error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Data);
    }
    const std::vector<double> c(25, 1.0), d(25, 0.0);
    CHECK_THROWS_AS(paired_permutation_test(c, d, 999, 1), Error);
  }
  SUBCASE("p-values are roughly uniform under the null") {
    Rng rng(6);
    std::vector<int> deciles(10, 0);
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
      std::vector<double> a(15), b(15);
      for (std::size_t i = 0; i < 15; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal();
      }
      const double p = paired_permutation_test(a, b, 0, 0);
      ++deciles[std::min(9, static_cast<int>(p * 10))];
    }
    for (int count : deciles) CHECK(std::abs(count / static_cast<double>(trials) - 0.1) <= 0.05);
  }
}

TEST_CASE("resample evaluation") {
  TrainConfig train;
  train.dim = 8;
  train.max_epochs = 3;
  train.batch_size = 5;
  train.seed = 1;
  SUBCASE("identical samples give zero spread") {
    // Only two forms carry weight, so every draw of size 2 is the same set.
    Corpus c{{"ab", {"s1", "A"}, 10}, {"ba", {"s2", "B"}, 10}, {"abb", {"s1", "B"}, 0},
             {"baa", {"s2", "A"}, 0}};
    ResampleProtocol p{.sizes = {2}, .variants = {Variant::PositionIndependent, Variant::Joint}, .resamples = 2,
                       .seed = 3, .train = train};
    auto rows = resample_eval(c, p);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      CHECK(r.k == 2);
      CHECK(r.accuracy.values.size() == 2);
      CHECK(r.accuracy.sd == 0.0);
      CHECK(r.edit_distance.sd == 0.0);
      CHECK(r.surprisal.sd == 0.0);
    }
  }
  SUBCASE("sizes and errors") {
    const auto corpus = gradphon::testing::weighted_corpus(20);
    ResampleProtocol p{.sizes = {30, 60}, .resamples = 2, .seed = 4, .train = train};
    auto rows = resample_eval(corpus, p);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].k == 30);
    CHECK(rows[1].k == 60);
    for (const auto& r : rows) {
      CHECK(r.accuracy.mean >= 0);
      CHECK(r.accuracy.mean <= 100);
      CHECK(std::isfinite(r.surprisal.mean));
    }
    p.sizes = {corpus.size()};
    try {
      resample_eval(corpus, p);
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
    p.sizes = {30};
    p.resamples = 1;
    CHECK_THROWS_AS(resample_eval(corpus, p), Error);
  }
}
