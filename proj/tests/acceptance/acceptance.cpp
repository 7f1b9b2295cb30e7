// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "app/embeddings.hpp"
#include "data/corpus.hpp"
#include "eval/metrics.hpp"
#include "eval/permutation.hpp"
#include "model/checkpoint.hpp"
#include "model/network.hpp"
#include "rng.hpp"
#include "support/fixtures.hpp"
#include "training/trainer.hpp"

using namespace gradphon;
namespace fx = gradphon::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Variant kVariants[] = {Variant::PositionIndependent, Variant::PositionDependent, Variant::Joint};

const char* short_name(Variant v) {
  switch (v) {
    case Variant::PositionIndependent: return "pos-indep";
    case Variant::PositionDependent: return "pos-dep";
    case Variant::Joint: return "joint";
  }
  return "?";
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// 1
Outcome gradients() {
  const auto start = Clock::now();
  const ModelDims dims{.dim = 6, .symbols = 4, .morphemes = 2};
  const LexiconEntry entry{{0, 1}, {1, 3, 0, 2}, 1};
  Rng rng(101);
  std::vector<std::vector<double>> noise(8, std::vector<double>(dims.dim));
  for (auto& d : noise)
    for (auto& x : d) x = rng.normal();

  double worst = 0;
  std::string where;
  for (Variant v : kVariants) {
    auto params = fx::random_params(dims, 7);
    for (const auto& [tensor, err] : fx::end_to_end_gradient_errors(v, params, entry, noise)) {
      if (err >= worst) {
        worst = err;
        where = std::string(short_name(v)) + " " + tensor;
      }
    }
  }
  const double secs = seconds_since(start);
  return {worst < 1e-4 && secs < 60, fmt("max relative error %.2e (%s), %.1fs", worst, where.c_str(), secs)};
}

// 2
Outcome probability_mass() {
  double worst = 0;
  std::string detail;
  for (Variant v : kVariants) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto params = fx::random_params({.dim = 3, .symbols = 2, .morphemes = 2}, seed, 0.3);
      const double mass = fx::total_probability_mass(v, params, {0, 1}, 4);
      worst = std::max(worst, std::abs(mass - 1.0));
    }
  }
  return {worst <= 1e-8, fmt("max |mass - 1| = %.2e over 3 variants x 3 models", worst)};
}

// 3
Outcome overfit() {
  const auto start = Clock::now();
  const Corpus forms = fx::overfit_forms();
  const auto vocab = build_vocab(forms);
  std::vector<std::size_t> all(forms.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto entries = encode_all(forms, all, vocab);

  TrainConfig cfg;
  cfg.variant = Variant::PositionIndependent;
  cfg.dim = 32;
  cfg.dropout = 0.0;
  cfg.learning_rate = 5e-3;
  cfg.batch_size = 5;
  cfg.patience = 5;
  cfg.max_epochs = 500;
  cfg.seed = 3;
  const auto result = train(cfg, vocab.alphabet, vocab.morphemes, entries, entries);
  const auto report = evaluate(result.checkpoint, forms);
  const double secs = seconds_since(start);
  return {report.accuracy >= 99.0 && secs < 300,
          fmt("train ACC %.1f after %zu epochs, %.1fs", report.accuracy, result.log.epochs.size(), secs)};
}

// 4 and 7 share these runs.
struct HarmonyRun {
  std::map<Variant, double> test_accuracy;
  Checkpoint pos_indep;
};

TrainConfig harmony_config(Variant v, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.variant = v;
  cfg.dim = 64;
  cfg.dropout = 0.2;
  cfg.learning_rate = 5e-3;
  cfg.batch_size = 10;
  cfg.patience = 4;
  cfg.max_epochs = 300;
  cfg.seed = seed;
  return cfg;
}

const std::vector<HarmonyRun>& harmony_runs() {
  static const std::vector<HarmonyRun> runs = [] {
    const auto lang = fx::harmony_language();
    const auto vocab = build_vocab(lang.corpus);
    std::vector<HarmonyRun> out;
    for (std::uint64_t seed : {1, 2, 3}) {
      const Split split = split_paradigms(lang.corpus, {.train = 0.8, .dev = 0.1, .test = 0.1, .seed = seed});
      const auto train_set = encode_all(lang.corpus, split.train, vocab);
      const auto dev_set = encode_all(lang.corpus, split.dev, vocab);
      std::vector<Form> test;
      for (std::size_t i : split.test) test.push_back(lang.corpus[i]);
      HarmonyRun run;
      for (Variant v : kVariants) {
        auto result = train(harmony_config(v, seed), vocab.alphabet, vocab.morphemes, train_set, dev_set);
        run.test_accuracy[v] = evaluate(result.checkpoint, test).accuracy;
        if (v == Variant::PositionIndependent) run.pos_indep = std::move(result.checkpoint);
      }
      std::printf("  harmony seed %llu: %zu/%zu/%zu  pos-indep %.1f  pos-dep %.1f  joint %.1f\n",
                  static_cast<unsigned long long>(seed), split.train.size(), split.dev.size(), split.test.size(),
                  run.test_accuracy[Variant::PositionIndependent], run.test_accuracy[Variant::PositionDependent],
                  run.test_accuracy[Variant::Joint]);
      std::fflush(stdout);
      out.push_back(std::move(run));
    }
    return out;
  }();
  return runs;
}

Outcome variant_ordering() {
  const auto start = Clock::now();
  std::map<Variant, double> mean;
  for (const auto& run : harmony_runs())
    for (const auto& [v, acc] : run.test_accuracy) mean[v] += acc / 3.0;
  const double pi = mean[Variant::PositionIndependent];
  const double pd = mean[Variant::PositionDependent];
  const double jt = mean[Variant::Joint];
  return {pi >= pd && pi >= jt,
          fmt("mean test ACC pos-indep %.1f, pos-dep %.1f, joint %.1f, %.0fs", pi, pd, jt, seconds_since(start))};
}

// 5
Outcome learning_curve() {
  const auto start = Clock::now();
  const Corpus corpus = fx::weighted_corpus();
  ResampleProtocol protocol;
  protocol.sizes = {50, 100, 200, 400};
  protocol.resamples = 5;
  protocol.seed = 11;
  protocol.train.dim = 32;
  protocol.train.dropout = 0.2;
  protocol.train.learning_rate = 5e-3;
  protocol.train.batch_size = 10;
  protocol.train.patience = 2;
  protocol.train.max_epochs = 60;
  protocol.train.seed = 5;
  const auto rows = resample_eval(corpus, protocol);

  std::string curve;
  std::size_t violations = 0;
  double worst_drop = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    curve += fmt("%s%zu:%.1f", i ? " " : "", rows[i].k, rows[i].accuracy.mean);
    if (i > 0 && rows[i].accuracy.mean < rows[i - 1].accuracy.mean) {
      ++violations;
      worst_drop = std::max(worst_drop, rows[i - 1].accuracy.mean - rows[i].accuracy.mean);
    }
  }
  const double secs = seconds_since(start);
  const bool trend = violations == 0 || (violations == 1 && worst_drop <= 2.0);
  return {trend && secs < 1800, fmt("mean ACC by k {%s}, %zu violation(s), %.0fs", curve.c_str(), violations, secs)};
}

// 6
std::size_t reference_edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

Outcome metric_oracles() {
  Rng rng(606);
  auto random_word = [&] {
    std::string w(rng.below(13), ' ');
    for (char& c : w) c = static_cast<char>('a' + rng.below(4));
    return w;
  };
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string a = random_word(), b = random_word();
    if (levenshtein(a, b) != reference_edit_distance(a, b)) ++mismatches;
  }

  double worst_p = 0;
  for (std::size_t n = 4; n <= 12; ++n) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.normal() + 0.3;
      b[i] = rng.normal();
    }
    const double exact = paired_permutation_test(a, b, 0, 0, PermutationMethod::Exact);
    const double mc = paired_permutation_test(a, b, 200000, n, PermutationMethod::MonteCarlo);
    worst_p = std::max(worst_p, std::abs(exact - mc));
  }

  double worst_s = 0;
  auto params = fx::random_params({.dim = 3, .symbols = 4, .morphemes = 2}, 9);
  std::fill(params.readout_v.value.begin(), params.readout_v.value.end(), 0.0);
  for (Variant v : kVariants) {
    for (const LexiconEntry& e : {LexiconEntry{{0}, {}, 1}, LexiconEntry{{1, 0}, {3, 2, 2, 0}, 1}}) {
      worst_s = std::max(worst_s, std::abs(surprisal(v, e, params) - std::log(5.0)));
    }
  }
  return {mismatches == 0 && worst_p <= 0.01 && worst_s <= 1e-10,
          fmt("levenshtein mismatches %zu/1000, max |exact - MC| p %.4f, max surprisal error %.1e", mismatches, worst_p,
              worst_s)};
}

// 7
Outcome harmony_geometry() {
  const auto lang = fx::harmony_language();
  std::string detail;
  bool pass = true;
  for (std::size_t r = 0; r < harmony_runs().size(); ++r) {
    const Checkpoint& ck = harmony_runs()[r].pos_indep;
    const std::size_t d = ck.params.morpheme_embedding.shape[1];
    auto row = [&](const std::string& id) {
      const std::size_t i = ck.morphemes.index(id);
      return std::span<const double>(ck.params.morpheme_embedding.value).subspan(i * d, d);
    };
    double same = 0, cross = 0;
    std::size_t n_same = 0, n_cross = 0;
    for (std::size_t i = 0; i < lang.stems.size(); ++i) {
      for (std::size_t j = i + 1; j < lang.stems.size(); ++j) {
        const double c = cosine_similarity(row(lang.stems[i]), row(lang.stems[j]));
        if (lang.stem_class.at(lang.stems[i]) == lang.stem_class.at(lang.stems[j])) {
          same += c;
          ++n_same;
        } else {
          cross += c;
          ++n_cross;
        }
      }
    }
    same /= static_cast<double>(n_same);
    cross /= static_cast<double>(n_cross);
    pass = pass && same > cross;
    detail += fmt("%sseed %zu same %.3f cross %.3f", r ? "; " : "", r + 1, same, cross);
  }
  return {pass, "stem embeddings: " + detail};
}

// 8
Outcome determinism() {
  const auto lang = fx::harmony_language();
  const auto vocab = build_vocab(lang.corpus);
  const Split split = split_paradigms(lang.corpus, {.seed = 4});
  const auto train_set = encode_all(lang.corpus, split.train, vocab);
  const auto dev_set = encode_all(lang.corpus, split.dev, vocab);
  bool logs_equal = true;
  double worst = 0;
  for (Variant v : kVariants) {
    TrainConfig cfg = harmony_config(v, 8);
    cfg.dim = 16;
    cfg.max_epochs = 6;
    const auto a = train(cfg, vocab.alphabet, vocab.morphemes, train_set, dev_set);
    const auto b = train(cfg, vocab.alphabet, vocab.morphemes, train_set, dev_set);
    logs_equal = logs_equal && a.log.to_text() == b.log.to_text() && a.log.best_epoch == b.log.best_epoch &&
                 a.checkpoint.to_bytes() == b.checkpoint.to_bytes();

    const std::string path = fx::scratch_dir("acceptance") + "/" + short_name(v) + ".ckpt";
    a.checkpoint.save(path);
    const Checkpoint loaded = Checkpoint::load(path);
    const double reloaded = mean_dev_loss(loaded.variant, loaded.params, dev_set);
    worst = std::max(worst, std::abs(reloaded - a.log.best_dev_loss));
    worst = std::max(worst, std::abs(reloaded - mean_dev_loss(v, a.checkpoint.params, dev_set)));
  }
  return {logs_equal && worst <= 1e-6,
          fmt("repeat runs %s, max reloaded dev loss difference %.2e", logs_equal ? "identical" : "DIFFER", worst)};
}

// 9
struct Quadrature {
  std::vector<double> nodes, weights;  // for E over N(0, 1)
};

// Gauss-Hermite rule for the standard normal from the eigenvalues of the
// Jacobi matrix of the probabilists' Hermite polynomials.
Quadrature gauss_hermite(std::size_t n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    j(i, i - 1) = j(i - 1, i) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
  Quadrature q;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    q.nodes.push_back(eig.eigenvalues()(i));
    q.weights.push_back(eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i));
  }
  return q;
}

double pinned_logprob(Variant v, const ModelParams& params, const LexiconEntry& e, std::vector<double> eps) {
  ad::Tape tape;
  ForwardOptions o;
  o.noise = NoiseSource::fixed({std::move(eps)});
  o.noise_per_step = false;
  Network net(tape, params, v, o);
  return net.word_logprob(e).item();
}

// -log of E_eps[p(s | eps)] for a 2-dimensional word-level epsilon.
double exact_nll(Variant v, const ModelParams& params, const LexiconEntry& e, std::size_t points) {
  const Quadrature q = gauss_hermite(points);
  std::vector<double> terms;
  for (std::size_t a = 0; a < points; ++a)
    for (std::size_t b = 0; b < points; ++b)
      terms.push_back(std::log(q.weights[a] * q.weights[b]) + pinned_logprob(v, params, e, {q.nodes[a], q.nodes[b]}));
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0;
  for (double t : terms) sum += std::exp(t - top);
  return -(top + std::log(sum));
}

Outcome elbo_bound() {
  const ModelDims dims{.dim = 2, .symbols = 2, .morphemes = 2};
  const LexiconEntry entry{{0, 1}, {1, 0, 1}, 1};
  bool pass = true;
  std::string detail;
  for (Variant v : {Variant::PositionIndependent, Variant::PositionDependent}) {
    const auto params = fx::random_params(dims, 21, 1.0);
    const double exact = exact_nll(v, params, entry, 120);
    const double check = exact_nll(v, params, entry, 80);

    Rng rng(909);
    const std::size_t draws = 10000;
    double sum = 0, sum_sq = 0;
    for (std::size_t i = 0; i < draws; ++i) {
      ad::Tape tape;
      ForwardOptions o;
      o.noise = NoiseSource::sample(rng);
      o.noise_per_step = false;
      Network net(tape, params, v, o);
      const double loss = -net.word_logprob(entry).item();
      sum += loss;
      sum_sq += loss * loss;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum_sq / draws - mean * mean) / (draws - 1));
    pass = pass && mean >= exact - 3 * se;
    detail += fmt("%s%s mean loss %.5f (se %.5f) vs exact %.5f (quadrature drift %.1e)", detail.empty() ? "" : "; ",
                  short_name(v), mean, se, exact, std::abs(exact - check));
  }
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "gradient correctness", gradients},
      {2, "probability mass", probability_mass},
      {3, "overfit", overfit},
      {4, "variant ordering", variant_ordering},
      {5, "learning curve", learning_curve},
      {6, "metric oracles", metric_oracles},
      {7, "harmony geometry", harmony_geometry},
      {8, "determinism and persistence", determinism},
      {9, "ELBO bound", elbo_bound},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %d. %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
