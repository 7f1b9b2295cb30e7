#include "training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "autodiff/adam.hpp"
#include "autodiff/ops.hpp"
#include "error.hpp"

namespace gradphon {

void TrainConfig::validate() const {
  if (dim == 0) fail(ErrorKind::Config, "dim must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorKind::Config, "dropout must be in [0, 1)");
  if (!(min_learning_rate > 0.0 && min_learning_rate <= learning_rate)) {
    fail(ErrorKind::Config, "need 0 < min learning rate <= learning rate");
  }
  if (patience < 1) fail(ErrorKind::Config, "patience must be at least 1");
  if (batch_size < 1) fail(ErrorKind::Config, "batch size must be at least 1");
  if (max_epochs < 1) fail(ErrorKind::Config, "max epochs must be at least 1");
  if (!(clip_norm > 0.0)) fail(ErrorKind::Config, "clip norm must be positive");
}

std::string TrainLog::to_text() const {
  std::string out = "epoch\ttrain_loss\tdev_loss\tlr\n";
  char buf[128];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\t%.17g\t%.17g\n", e.epoch, e.train_loss, e.dev_loss, e.learning_rate);
    out += buf;
  }
  return out;
}

PlateauSchedule::PlateauSchedule(double learning_rate, double min_learning_rate, std::size_t patience,
                                 double tolerance)
    : lr_(learning_rate),
      min_lr_(min_learning_rate),
      patience_(patience),
      tolerance_(tolerance),
      best_(std::numeric_limits<double>::infinity()) {}

bool PlateauSchedule::observe(double dev_loss) {
  if (dev_loss < best_ - tolerance_) {
    best_ = dev_loss;
    bad_epochs_ = 0;
    return true;
  }
  if (++bad_epochs_ >= patience_) {
    lr_ /= 2.0;
    ++halvings_;
    bad_epochs_ = 0;
    if (lr_ < min_lr_) stop_ = true;
  }
  return false;
}

ad::Tensor elbo_word_loss(Network& net, const LexiconEntry& entry) { return ad::scale(net.word_logprob(entry), -1.0); }

double mean_dev_loss(Variant variant, const ModelParams& params, std::span<const LexiconEntry> entries) {
  if (entries.empty()) fail(ErrorKind::Data, "empty evaluation set");
  double total = 0;
  for (const auto& e : entries) total -= word_logprob(variant, e, params);
  return total / static_cast<double>(entries.size());
}

std::size_t default_max_decode_len(std::span<const LexiconEntry> train) {
  std::size_t longest = 0;
  for (const auto& e : train) longest = std::max(longest, e.surface.size());
  return 2 * longest + 5;
}

namespace {

// Batches of words with equal morpheme count and similar length, in a
// per-epoch shuffled order.
std::vector<std::vector<std::size_t>> make_batches(std::span<const LexiconEntry> data, std::size_t batch_size,
                                                   Rng& rng) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = data[a].morphemes.size(), kb = data[b].morphemes.size();
    if (ka != kb) return ka < kb;
    return data[a].surface.size() < data[b].surface.size();
  });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    batches.emplace_back(order.begin() + i, order.begin() + std::min(order.size(), i + batch_size));
  }
  rng.shuffle(batches.begin(), batches.end());
  return batches;
}

}  // namespace

TrainResult train(const TrainConfig& config, const Alphabet& alphabet, const MorphemeVocab& morphemes,
                  std::span<const LexiconEntry> train_set, std::span<const LexiconEntry> dev_set,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) fail(ErrorKind::Config, "empty training set");
  if (dev_set.empty()) fail(ErrorKind::Config, "empty development set");

  ModelParams params({config.dim, alphabet.size(), morphemes.size()});
  Rng init_rng(derive_seed(config.seed, "init"));
  params.initialize(init_rng);
  Rng dropout_rng(derive_seed(config.seed, "dropout"));
  Rng noise_rng(derive_seed(config.seed, "noise"));
  Rng batch_rng(derive_seed(config.seed, "batches"));

  ad::Adam adam({config.learning_rate});
  PlateauSchedule schedule(config.learning_rate, config.min_learning_rate, config.patience,
                           config.improvement_tolerance);
  ModelParams best = params;
  TrainLog log;
  const auto param_list = params.all();
  ad::Tape tape;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    adam.set_learning_rate(schedule.learning_rate());
    double epoch_loss = 0;
    try {
      for (const auto& batch : make_batches(train_set, config.batch_size, batch_rng)) {
        params.zero_grad();
        const double weight = 1.0 / static_cast<double>(batch.size());
        for (std::size_t idx : batch) {
          tape.clear();
          ForwardOptions opts;
          opts.training = true;
          opts.dropout = config.dropout;
          opts.dropout_rng = &dropout_rng;
          opts.noise = NoiseSource::sample(noise_rng);
          opts.noise_per_step = config.noise_per_step;
          Network net(tape, params, config.variant, std::move(opts));
          ad::Tensor loss = elbo_word_loss(net, train_set[idx]);
          if (!std::isfinite(loss.item())) fail(ErrorKind::Numeric, "non-finite loss");
          epoch_loss += loss.item();
          tape.backward(loss, weight);
        }
        ad::clip_global_norm(param_list, config.clip_norm);
        adam.step(param_list);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numeric) throw;
      fail(ErrorKind::Training, "training diverged in epoch " + std::to_string(epoch) + ": " + e.what());
    }
    tape.clear();

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(train_set.size());
    try {
      rec.dev_loss = mean_dev_loss(config.variant, params, dev_set);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numeric) throw;
      fail(ErrorKind::Training, "dev loss not finite in epoch " + std::to_string(epoch) + ": " + e.what());
    }
    if (!std::isfinite(rec.dev_loss)) fail(ErrorKind::Training, "dev loss not finite in epoch " + std::to_string(epoch));
    rec.learning_rate = schedule.learning_rate();
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (schedule.observe(rec.dev_loss)) {
      best = params;
      log.best_epoch = epoch;
      log.best_dev_loss = rec.dev_loss;
    }
    if (schedule.should_stop()) break;
  }

  TrainResult result;
  result.checkpoint = Checkpoint::capture(config.variant, default_max_decode_len(train_set), alphabet, morphemes, best);
  result.log = std::move(log);
  return result;
}

}  // namespace gradphon
