#include "model/network.hpp"

#include <algorithm>
#include <cmath>

#include "autodiff/ops.hpp"
#include "error.hpp"

namespace gradphon {

NoiseSource NoiseSource::sample(Rng& rng) {
  NoiseSource s;
  s.rng_ = &rng;
  return s;
}

NoiseSource NoiseSource::fixed(std::vector<std::vector<double>> draws) {
  NoiseSource s;
  s.fixed_ = std::move(draws);
  return s;
}

std::vector<double> NoiseSource::draw(std::size_t dim) {
  if (!fixed_.empty()) {
    const auto& d = fixed_[next_++ % fixed_.size()];
    if (d.size() != dim) fail(ErrorKind::Dimension, "fixed noise draw has " + std::to_string(d.size()) + " values, need " + std::to_string(dim));
    return d;
  }
  std::vector<double> eps(dim, 0.0);
  if (rng_) {
    for (auto& e : eps) e = rng_->normal();
  }
  return eps;
}

Network::Network(ad::Tape& tape, ModelParams& params, Variant variant, ForwardOptions options)
    : tape_(tape), mutable_params_(&params), params_(params), variant_(variant), options_(std::move(options)),
      dims_(params.dims()) {
  bind_leaves();
}

Network::Network(ad::Tape& tape, const ModelParams& params, Variant variant, ForwardOptions options)
    : tape_(tape), mutable_params_(nullptr), params_(params), variant_(variant), options_(std::move(options)),
      dims_(params.dims()) {
  bind_leaves();
}

void Network::bind_leaves() {
  if (options_.training && options_.dropout > 0.0 && options_.dropout_rng == nullptr) {
    fail(ErrorKind::Config, "training with dropout needs a dropout rng");
  }
  auto leaf = [&](auto member) {
    return mutable_params_ ? tape_.parameter(mutable_params_->*member) : tape_.frozen(params_.*member);
  };
  morpheme_table_ = leaf(&ModelParams::morpheme_embedding);
  char_table_ = leaf(&ModelParams::char_embedding);
  w_ih_ = leaf(&ModelParams::lstm_input);
  w_hh_ = leaf(&ModelParams::lstm_hidden);
  bias_ = leaf(&ModelParams::lstm_bias);
  readout_w_ = leaf(&ModelParams::readout_w);
  readout_v_ = leaf(&ModelParams::readout_v);
  attention_t_ = leaf(&ModelParams::attention_t);
}

ad::Tensor Network::embed_morphemes(std::span<const std::size_t> morphemes) {
  if (morphemes.empty()) fail(ErrorKind::Data, "empty morpheme decomposition");
  for (std::size_t m : morphemes) {
    if (m >= dims_.morphemes) {
      fail(ErrorKind::Vocabulary, "morpheme index " + std::to_string(m) + " outside vocabulary of " +
                                      std::to_string(dims_.morphemes));
    }
  }
  ad::Tensor stacked = ad::gather_rows(morpheme_table_, morphemes);
  if (!options_.training) return stacked;
  return ad::dropout(stacked, options_.dropout, true, *options_.dropout_rng);
}

DecoderState Network::initial_state() {
  const std::size_t d = dims_.dim;
  return {tape_.constant({d}, std::vector<double>(d, 0.0)), tape_.constant({d}, std::vector<double>(d, 0.0))};
}

DecoderState Network::decoder_step(std::size_t prev_symbol, const DecoderState& state) {
  const std::size_t d = dims_.dim;
  if (prev_symbol >= dims_.symbols + 3) {
    fail(ErrorKind::Index, "symbol index " + std::to_string(prev_symbol) + " outside character table");
  }
  ad::Tensor x = ad::embedding_lookup(char_table_, prev_symbol);
  if (options_.training) x = ad::dropout(x, options_.dropout, true, *options_.dropout_rng);

  ad::Tensor gates = ad::add(ad::add(ad::matmul(w_ih_, x), ad::matmul(w_hh_, state.hidden)), bias_);
  ad::Tensor input_gate = ad::sigmoid(ad::slice(gates, 0, d));
  ad::Tensor forget_gate = ad::sigmoid(ad::slice(gates, d, d));
  ad::Tensor candidate = ad::tanh(ad::slice(gates, 2 * d, d));
  ad::Tensor output_gate = ad::sigmoid(ad::slice(gates, 3 * d, d));

  ad::Tensor cell = ad::add(ad::mul(forget_gate, state.cell), ad::mul(input_gate, candidate));
  ad::Tensor hidden = ad::mul(output_gate, ad::tanh(cell));
  return {hidden, cell};
}

ad::Tensor Network::emission(const ad::Tensor& hidden, const ad::Tensor& uf) {
  ad::Tensor joined = ad::concat(hidden, uf);
  ad::Tensor logits = ad::matmul(readout_v_, ad::tanh(ad::matmul(readout_w_, joined)));
  return ad::log_softmax(logits);
}

UFGaussian Network::uf_pos_independent(const ad::Tensor& morphemes) {
  if (morphemes.rank() != 2 || morphemes.shape()[0] == 0) fail(ErrorKind::Data, "empty morpheme decomposition");
  return {ad::mean_rows(morphemes)};
}

ad::Tensor Network::attention_log_weights(const ad::Tensor& hidden, const ad::Tensor& morphemes) {
  // scores_j = h^T T m_j, computed as M (T^T h).
  ad::Tensor query = ad::matmul(hidden, attention_t_);
  return ad::log_softmax(ad::matmul(morphemes, query));
}

ad::Tensor Network::attention_weights(const ad::Tensor& hidden, const ad::Tensor& morphemes) {
  return ad::exp(attention_log_weights(hidden, morphemes));
}

UFGaussian Network::uf_pos_dependent(const ad::Tensor& hidden, const ad::Tensor& morphemes) {
  return {ad::matmul(attention_weights(hidden, morphemes), morphemes)};
}

ad::Tensor Network::joint_emission(const ad::Tensor& hidden, const ad::Tensor& morphemes) {
  const std::size_t k = morphemes.shape()[0];
  if (k == 1) return emission(hidden, ad::embedding_lookup(morphemes, 0));
  ad::Tensor log_alpha = attention_log_weights(hidden, morphemes);
  std::vector<ad::Tensor> components;
  components.reserve(k);
  for (std::size_t j = 0; j < k; ++j) components.push_back(emission(hidden, ad::embedding_lookup(morphemes, j)));
  // Rows: output symbols; columns: log alpha_j + log p_j(symbol).
  ad::Tensor weighted = ad::add(ad::transpose(ad::stack_rows(components)), log_alpha);
  return ad::logsumexp_rows(weighted);
}

ad::Tensor Network::reparam_sample(const UFGaussian& uf) {
  if (options_.noise.is_mean()) return uf.mean;
  return ad::add(uf.mean, tape_.constant({dims_.dim}, options_.noise.draw(dims_.dim)));
}

Network::Word Network::begin_word(std::span<const std::size_t> morphemes) {
  Word w;
  w.morphemes = embed_morphemes(morphemes);
  w.state = initial_state();
  if (variant_ == Variant::PositionIndependent) {
    w.word_uf = reparam_sample(uf_pos_independent(w.morphemes));
  } else if (variant_ == Variant::PositionDependent && !options_.noise_per_step && !options_.noise.is_mean()) {
    w.word_noise = options_.noise.draw(dims_.dim);
  }
  return w;
}

ad::Tensor Network::next_distribution(Word& word, std::size_t prev_symbol) {
  word.state = decoder_step(prev_symbol, word.state);
  const ad::Tensor& h = word.state.hidden;
  switch (variant_) {
    case Variant::PositionIndependent:
      return emission(h, word.word_uf);
    case Variant::PositionDependent: {
      UFGaussian uf = uf_pos_dependent(h, word.morphemes);
      ad::Tensor u = word.word_noise.empty()
                         ? reparam_sample(uf)
                         : ad::add(uf.mean, tape_.constant({dims_.dim}, word.word_noise));
      return emission(h, u);
    }
    case Variant::Joint:
      return joint_emission(h, word.morphemes);
  }
  fail(ErrorKind::Config, "unknown variant");
}

ad::Tensor Network::word_logprob(const LexiconEntry& entry) {
  Word word = begin_word(entry.morphemes);
  std::vector<ad::Tensor> terms;
  terms.reserve(entry.surface.size() + 1);
  std::size_t prev = bos();
  for (std::size_t t = 0; t <= entry.surface.size(); ++t) {
    const std::size_t target = t < entry.surface.size() ? entry.surface[t] : eos();
    if (target >= dims_.symbols + 1) fail(ErrorKind::Index, "surface symbol index " + std::to_string(target) + " outside alphabet");
    ad::Tensor dist = next_distribution(word, prev);
    terms.push_back(ad::pick(dist, target));
    prev = target;
  }
  return ad::add_n(terms);
}

double word_logprob(Variant variant, const LexiconEntry& entry, const ModelParams& params) {
  ad::Tape tape;
  Network net(tape, params, variant);
  return net.word_logprob(entry).item();
}

std::vector<std::size_t> greedy_decode(Variant variant, std::span<const std::size_t> morphemes,
                                       const ModelParams& params, std::size_t max_len) {
  if (max_len < 1) fail(ErrorKind::Config, "max_len must be at least 1");
  ad::Tape tape;
  Network net(tape, params, variant);
  Network::Word word = net.begin_word(morphemes);
  std::vector<std::size_t> out;
  std::size_t prev = net.bos();
  while (out.size() < max_len) {
    auto dist = net.next_distribution(word, prev).values();
    const auto best = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    if (best == net.eos()) break;
    out.push_back(best);
    prev = best;
  }
  return out;
}

std::vector<std::size_t> beam_decode(Variant variant, std::span<const std::size_t> morphemes,
                                     const ModelParams& params, std::size_t max_len, std::size_t beam_size) {
  if (beam_size <= 1) return greedy_decode(variant, morphemes, params, max_len);
  if (max_len < 1) fail(ErrorKind::Config, "max_len must be at least 1");
  ad::Tape tape;
  Network net(tape, params, variant);

  struct Hypothesis {
    Network::Word word;
    std::vector<std::size_t> symbols;
    double score = 0.0;
  };
  std::vector<Hypothesis> beam{{net.begin_word(morphemes), {}, 0.0}};
  std::vector<Hypothesis> finished;

  while (!beam.empty()) {
    std::vector<Hypothesis> candidates;
    for (Hypothesis& hyp : beam) {
      if (hyp.symbols.size() == max_len) {
        finished.push_back(std::move(hyp));
        continue;
      }
      const std::size_t prev = hyp.symbols.empty() ? net.bos() : hyp.symbols.back();
      Network::Word word = hyp.word;
      auto dist = net.next_distribution(word, prev).values();
      for (std::size_t s = 0; s < dist.size(); ++s) {
        Hypothesis next{word, hyp.symbols, hyp.score + dist[s]};
        if (s == net.eos()) {
          finished.push_back(std::move(next));
        } else {
          next.symbols.push_back(s);
          candidates.push_back(std::move(next));
        }
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Hypothesis& a, const Hypothesis& b) { return a.score > b.score; });
    if (candidates.size() > beam_size) candidates.resize(beam_size);
    beam = std::move(candidates);
    // Stop once no live hypothesis can beat the best finished one.
    if (!finished.empty() && !beam.empty()) {
      double best_done = -1e300;
      for (const auto& f : finished) best_done = std::max(best_done, f.score);
      if (beam.front().score < best_done) break;
    }
  }
  const auto best = std::max_element(finished.begin(), finished.end(),
                                     [](const Hypothesis& a, const Hypothesis& b) { return a.score < b.score; });
  return best->symbols;
}

}  // namespace gradphon
