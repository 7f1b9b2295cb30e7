#pragma once

#include <span>
#include <vector>

#include "autodiff/tensor.hpp"
#include "model/params.hpp"
#include "model/vocab.hpp"
#include "rng.hpp"

namespace gradphon {

/// Supplies the Gaussian noise of the reparameterized underlying form.
class NoiseSource {
 public:
  /// epsilon = 0: the distribution mean.
  static NoiseSource mean() { return NoiseSource(); }
  static NoiseSource sample(Rng& rng);
  /// Replays the given draws in order, cycling when exhausted.
  static NoiseSource fixed(std::vector<std::vector<double>> draws);

  std::vector<double> draw(std::size_t dim);
  bool is_mean() const { return rng_ == nullptr && fixed_.empty(); }

 private:
  Rng* rng_ = nullptr;
  std::vector<std::vector<double>> fixed_;
  std::size_t next_ = 0;
};

struct ForwardOptions {
  bool training = false;
  double dropout = 0.0;
  Rng* dropout_rng = nullptr;
  NoiseSource noise = NoiseSource::mean();
  /// Position-dependent variant only: draw a fresh epsilon at every decoding
  /// step (true) or one per word (false).
  bool noise_per_step = true;
};

/// Isotropic Gaussian over an underlying form; the covariance is always I.
struct UFGaussian {
  ad::Tensor mean;
};

struct DecoderState {
  ad::Tensor hidden;
  ad::Tensor cell;
};

/// The generative network recorded onto one tape: morpheme embeddings, the
/// character-level LSTM decoder, the two-layer readout and the three ways of
/// composing morphemes into the distribution over the next symbol.
class Network {
 public:
  /// Gradients flow into `params`.
  Network(ad::Tape& tape, ModelParams& params, Variant variant, ForwardOptions options = {});
  /// Inference only; `params` is never written.
  Network(ad::Tape& tape, const ModelParams& params, Variant variant, ForwardOptions options = {});

  Variant variant() const { return variant_; }
  std::size_t dim() const { return dims_.dim; }
  std::size_t output_size() const { return dims_.symbols + 1; }
  std::size_t eos() const { return dims_.symbols; }
  std::size_t bos() const { return dims_.symbols + 1; }

  /// k x d stack of morpheme embeddings (dropout applied in training).
  ad::Tensor embed_morphemes(std::span<const std::size_t> morphemes);

  DecoderState initial_state();
  /// One LSTM update reading the embedding of `prev_symbol`.
  DecoderState decoder_step(std::size_t prev_symbol, const DecoderState& state);

  /// log softmax(V tanh(W [h; u])) over symbols plus EOS.
  ad::Tensor emission(const ad::Tensor& hidden, const ad::Tensor& uf);

  UFGaussian uf_pos_independent(const ad::Tensor& morphemes);
  /// log alpha_j = log softmax_j(h^T T m_j).
  ad::Tensor attention_log_weights(const ad::Tensor& hidden, const ad::Tensor& morphemes);
  ad::Tensor attention_weights(const ad::Tensor& hidden, const ad::Tensor& morphemes);
  UFGaussian uf_pos_dependent(const ad::Tensor& hidden, const ad::Tensor& morphemes);
  /// log sum_j alpha_j softmax(f([h; m_j])).
  ad::Tensor joint_emission(const ad::Tensor& hidden, const ad::Tensor& morphemes);

  /// mean + epsilon, epsilon taken from the noise source as a constant.
  ad::Tensor reparam_sample(const UFGaussian& uf);

  /// Per-word decoding context.
  struct Word {
    ad::Tensor morphemes;
    DecoderState state;
    ad::Tensor word_uf;                  // position-independent UF sample
    std::vector<double> word_noise;      // position-dependent, per-word noise mode
  };

  Word begin_word(std::span<const std::size_t> morphemes);
  /// Reads `prev_symbol`, advances the decoder and returns the log-distribution
  /// of the next symbol under this network's variant.
  ad::Tensor next_distribution(Word& word, std::size_t prev_symbol);

  /// Teacher-forced log p(surface | morphemes), summed over every surface
  /// symbol and the final EOS.
  ad::Tensor word_logprob(const LexiconEntry& entry);

 private:
  void bind_leaves();

  ad::Tape& tape_;
  ModelParams* mutable_params_;
  const ModelParams& params_;
  Variant variant_;
  ForwardOptions options_;
  ModelDims dims_;

  ad::Tensor morpheme_table_, char_table_, w_ih_, w_hh_, bias_, readout_w_, readout_v_, attention_t_;
};

/// log p(surface | morphemes) with epsilon = 0 and no dropout.
double word_logprob(Variant variant, const LexiconEntry& entry, const ModelParams& params);

/// Argmax decoding with epsilon = 0 until EOS or `max_len` symbols.
std::vector<std::size_t> greedy_decode(Variant variant, std::span<const std::size_t> morphemes,
                                       const ModelParams& params, std::size_t max_len);

/// Beam search over complete hypotheses (ending in EOS or reaching max_len).
std::vector<std::size_t> beam_decode(Variant variant, std::span<const std::size_t> morphemes,
                                     const ModelParams& params, std::size_t max_len, std::size_t beam_size);

}  // namespace gradphon
