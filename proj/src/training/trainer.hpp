#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "autodiff/tensor.hpp"
#include "model/checkpoint.hpp"
#include "model/network.hpp"

namespace gradphon {

struct TrainConfig {
  Variant variant = Variant::PositionIndependent;
  std::size_t dim = 200;
  double dropout = 0.2;
  double learning_rate = 1e-3;
  double min_learning_rate = 1e-5;
  /// Epochs without dev improvement before the learning rate is halved.
  std::size_t patience = 1;
  std::size_t batch_size = 20;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;
  /// Position-dependent variant: fresh epsilon per decoding step.
  bool noise_per_step = true;
  /// Cap on the global gradient norm.
  double clip_norm = 5.0;
  /// A dev loss counts as an improvement only if lower by at least this much.
  double improvement_tolerance = 1e-6;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0;
  double dev_loss = 0;
  double learning_rate = 0;
  double wall_seconds = 0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_dev_loss = 0;

  /// Tab-separated epoch, train_loss, dev_loss, lr; wall time is left out so
  /// that identical runs give identical files.
  std::string to_text() const;
};

/// Halve-on-plateau learning-rate schedule with early stopping.
class PlateauSchedule {
 public:
  PlateauSchedule(double learning_rate, double min_learning_rate, std::size_t patience, double tolerance = 1e-6);

  /// Records one epoch's dev loss; returns true if it is a new best.
  bool observe(double dev_loss);

  double learning_rate() const { return lr_; }
  bool should_stop() const { return stop_; }
  std::size_t halvings() const { return halvings_; }
  double best() const { return best_; }

 private:
  double lr_, min_lr_;
  std::size_t patience_;
  double tolerance_;
  double best_;
  std::size_t bad_epochs_ = 0;
  std::size_t halvings_ = 0;
  bool stop_ = false;
};

/// Single-sample ELBO estimate for one word: -sum_t log p_sr(s_t | s_<t, u^),
/// with u^ drawn through the network's noise source. For the joint variant
/// there is no latent and this is the exact negative log-likelihood.
ad::Tensor elbo_word_loss(Network& net, const LexiconEntry& entry);

/// Mean per-word negative log-likelihood with epsilon = 0 and no dropout.
double mean_dev_loss(Variant variant, const ModelParams& params, std::span<const LexiconEntry> entries);

/// Longest decode allowed for a model trained on `train`.
std::size_t default_max_decode_len(std::span<const LexiconEntry> train);

struct TrainResult {
  Checkpoint checkpoint;  // parameters of the best dev epoch
  TrainLog log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Minimizes the mean per-word loss with Adam, halving the learning rate on
/// dev plateaus and stopping when it falls below the minimum.
TrainResult train(const TrainConfig& config, const Alphabet& alphabet, const MorphemeVocab& morphemes,
                  std::span<const LexiconEntry> train_set, std::span<const LexiconEntry> dev_set,
                  const EpochCallback& on_epoch = {});

}  // namespace gradphon
