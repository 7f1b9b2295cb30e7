#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "error.hpp"
#include "model/network.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace gradphon {

double surprisal(Variant variant, const LexiconEntry& entry, const ModelParams& params) {
  return -word_logprob(variant, entry, params) / static_cast<double>(entry.surface.size() + 1);
}

EvalReport evaluate(const Checkpoint& checkpoint, std::span<const Form> test, const DecodeOptions& decode) {
  if (test.empty()) fail(ErrorKind::Data, "empty test set");

  std::set<std::string> unknown_symbols;
  for (const Form& f : test) {
    for (const auto& s : utf8_symbols(f.surface))
      if (!checkpoint.alphabet.find(s)) unknown_symbols.insert(s);
  }
  if (!unknown_symbols.empty()) {
    std::string listed;
    for (const auto& s : unknown_symbols) listed += (listed.empty() ? "" : " ") + s;
    fail(ErrorKind::Compatibility, "test forms use symbols outside the checkpoint alphabet: " + listed);
  }

  EvalReport report;
  report.items = test.size();
  double correct = 0, distance = 0, nll = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Form& f = test[i];
    PredictionRecord rec;
    rec.item = i;
    rec.gold = f.surface;
    for (const auto& m : f.morphemes) rec.morphemes += (rec.morphemes.empty() ? "" : " + ") + m;
    const std::vector<std::size_t> gold = checkpoint.alphabet.encode(f.surface);

    LexiconEntry entry;
    entry.surface = gold;
    for (const auto& m : f.morphemes) {
      if (auto idx = checkpoint.morphemes.find(m)) {
        entry.morphemes.push_back(*idx);
      } else {
        rec.unknown_morpheme = true;
      }
    }
    if (rec.unknown_morpheme) {
      rec.edit_distance = gold.size();
      ++report.unknown_morpheme_items;
    } else {
      const auto pred = beam_decode(checkpoint.variant, entry.morphemes, checkpoint.params,
                                    checkpoint.max_decode_len, decode.beam_size);
      rec.predicted = checkpoint.alphabet.decode(pred);
      rec.correct = pred == gold;
      rec.edit_distance = levenshtein<std::size_t>(pred, gold);
      rec.surprisal = surprisal(checkpoint.variant, entry, checkpoint.params);
      nll += rec.surprisal;
    }
    correct += rec.correct ? 1 : 0;
    distance += static_cast<double>(rec.edit_distance);
    report.records.push_back(std::move(rec));
  }
  const auto n = static_cast<double>(test.size());
  report.accuracy = 100.0 * correct / n;
  report.mean_edit_distance = distance / n;
  const std::size_t scored = test.size() - report.unknown_morpheme_items;
  report.mean_surprisal = scored ? nll / static_cast<double>(scored) : std::nan("");
  return report;
}

MetricSummary summarize(std::vector<double> values) {
  MetricSummary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(s.values.size());
  if (s.values.size() > 1) {
    double sq = 0;
    for (double v : s.values) sq += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(sq / static_cast<double>(s.values.size() - 1));
  }
  return s;
}

std::vector<ResampleRow> resample_eval(std::span<const Form> corpus, const ResampleProtocol& protocol) {
  if (protocol.resamples < 2) fail(ErrorKind::Config, "need at least 2 resamples");
  if (protocol.sizes.empty()) fail(ErrorKind::Config, "no training-set sizes given");
  for (std::size_t k : protocol.sizes) {
    if (k == 0 || k >= corpus.size()) {
      fail(ErrorKind::Config, "training-set size " + std::to_string(k) + " must be in [1, " +
                                  std::to_string(corpus.size()) + ") to leave held-out forms");
    }
  }
  const Vocabulary vocab = build_vocab(corpus);

  std::vector<ResampleRow> rows;
  for (std::size_t k : protocol.sizes) {
    std::vector<std::vector<double>> acc(protocol.variants.size()), mld(protocol.variants.size()),
        nll(protocol.variants.size());
    for (std::size_t r = 0; r < protocol.resamples; ++r) {
      const std::uint64_t draw_seed = derive_seed(derive_seed(protocol.seed, k), r);
      // Everything after the draw depends only on the sampled set, so equal
      // samples give equal results.
      auto train_idx = sample_training_set(corpus, k, derive_seed(draw_seed, "sample"));
      std::sort(train_idx.begin(), train_idx.end());
      std::uint64_t set_seed = protocol.seed;
      for (std::size_t i : train_idx) set_seed = derive_seed(set_seed, static_cast<std::uint64_t>(i));

      std::set<std::string> covered;
      std::vector<bool> in_train(corpus.size(), false);
      for (std::size_t i : train_idx) {
        in_train[i] = true;
        covered.insert(corpus[i].morphemes.begin(), corpus[i].morphemes.end());
      }
      std::vector<std::size_t> held_out;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (in_train[i]) continue;
        const bool ok = std::all_of(corpus[i].morphemes.begin(), corpus[i].morphemes.end(),
                                    [&](const std::string& m) { return covered.count(m) > 0; });
        if (ok) held_out.push_back(i);
      }
      if (held_out.size() < 2) {
        fail(ErrorKind::Data, "resample " + std::to_string(r) + " at k=" + std::to_string(k) +
                                  ": fewer than 2 held-out forms with trained morphemes");
      }
      Rng split_rng(derive_seed(set_seed, "heldout"));
      split_rng.shuffle(held_out.begin(), held_out.end());
      const std::size_t n_dev = held_out.size() / 2;
      const std::vector<std::size_t> dev_idx(held_out.begin(), held_out.begin() + n_dev);
      const std::vector<std::size_t> test_idx(held_out.begin() + n_dev, held_out.end());

      const auto train_set = encode_all(corpus, train_idx, vocab);
      const auto dev_set = encode_all(corpus, dev_idx, vocab);
      Corpus test_forms;
      for (std::size_t i : test_idx) test_forms.push_back(corpus[i]);

      for (std::size_t v = 0; v < protocol.variants.size(); ++v) {
        TrainConfig cfg = protocol.train;
        cfg.variant = protocol.variants[v];
        TrainResult result;
        try {
          result = train(cfg, vocab.alphabet, vocab.morphemes, train_set, dev_set);
        } catch (const Error& e) {
          fail(e.kind(), "resample " + std::to_string(r) + " at k=" + std::to_string(k) + ": " + e.what());
        }
        const EvalReport report = evaluate(result.checkpoint, test_forms);
        acc[v].push_back(report.accuracy);
        mld[v].push_back(report.mean_edit_distance);
        nll[v].push_back(report.mean_surprisal);
      }
    }
    for (std::size_t v = 0; v < protocol.variants.size(); ++v) {
      rows.push_back({k, protocol.variants[v], summarize(acc[v]), summarize(mld[v]), summarize(nll[v])});
    }
  }
  return rows;
}

}  // namespace gradphon
