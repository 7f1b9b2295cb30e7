#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "data/corpus.hpp"
#include "model/checkpoint.hpp"
#include "training/trainer.hpp"

namespace gradphon {

/// Unit-cost edit distance (insert, delete, substitute), two-row DP.
template <class T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(std::span<const char>(a.data(), a.size()), std::span<const char>(b.data(), b.size()));
}

/// Negative log-probability of the gold form per emitted symbol, in nats.
/// The EOS emission counts in both the sum and the length.
double surprisal(Variant variant, const LexiconEntry& entry, const ModelParams& params);

struct PredictionRecord {
  std::size_t item = 0;
  std::string morphemes;  // joined with " + "
  std::string gold;
  std::string predicted;
  bool correct = false;
  std::size_t edit_distance = 0;
  /// Nats per symbol; meaningless when unknown_morpheme is set.
  double surprisal = 0;
  bool unknown_morpheme = false;
};

struct EvalReport {
  double accuracy = 0;            // percent
  double mean_edit_distance = 0;  // per item
  double mean_surprisal = 0;      // over items with known morphemes
  std::size_t items = 0;
  std::size_t unknown_morpheme_items = 0;
  std::vector<PredictionRecord> records;
};

struct DecodeOptions {
  std::size_t beam_size = 1;
};

/// Scores a checkpoint on gold forms. Forms whose morphemes the checkpoint
/// does not know count as misses with edit distance |gold|; gold symbols
/// outside the alphabet are a compatibility error.
EvalReport evaluate(const Checkpoint& checkpoint, std::span<const Form> test, const DecodeOptions& decode = {});

struct MetricSummary {
  double mean = 0;
  double sd = 0;  // sample standard deviation (n - 1)
  std::vector<double> values;
};

MetricSummary summarize(std::vector<double> values);

struct ResampleRow {
  std::size_t k = 0;
  Variant variant = Variant::PositionIndependent;
  MetricSummary accuracy, edit_distance, surprisal;
};

struct ResampleProtocol {
  std::vector<std::size_t> sizes;
  std::vector<Variant> variants{Variant::PositionIndependent};
  std::size_t resamples = 10;
  std::uint64_t seed = 0;
  /// Model seed is shared by all resamples; `seed` drives only the data draws.
  TrainConfig train;
};

/// For each k and variant: draw a weighted training sample, train, and
/// evaluate on the held-out forms whose morphemes the sample covers (half of
/// them serve as dev set). Repeated `resamples` times.
std::vector<ResampleRow> resample_eval(std::span<const Form> corpus, const ResampleProtocol& protocol);

}  // namespace gradphon
