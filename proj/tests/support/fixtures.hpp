#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "autodiff/tensor.hpp"
#include "data/corpus.hpp"
#include "model/network.hpp"
#include "model/params.hpp"

namespace gradphon::testing {

/// Agglutinative toy language with 2-way backness harmony: 20 CVCV stems
/// (half with back vowels a/o/u, half with front vowels e/i/y) times 10
/// suffixes whose vowels A and U surface as a/e and u/y after back/front stems.
struct HarmonyLanguage {
  Corpus corpus;  // 200 forms, stem morpheme then suffix morpheme
  std::vector<std::string> stems;
  std::vector<std::string> suffixes;
  std::map<std::string, int> stem_class;  // 0 back, 1 front
};

HarmonyLanguage harmony_language();

/// 10 stems x 5 suffixes with a voicing-assimilation rule; 50 forms.
Corpus overfit_forms();

/// Stem + optional affix corpus with Zipf-like token counts and a
/// stem-final alternation, in the weighted (CELEX-style) shape.
Corpus weighted_corpus(std::size_t stems = 120);

/// A dozen English verb forms including run + V;PST -> ran.
Corpus english_toy();

/// Random model with every parameter drawn from N(0, sd^2).
ModelParams random_params(ModelDims dims, std::uint64_t seed, double sd = 0.5);

/// Sum of exp(word_logprob) over every string of length <= max_len, plus the
/// probability of emitting max_len + 1 symbols without stopping (the
/// continuation mass). Equals 1 for a normalized model.
double total_probability_mass(Variant variant, const ModelParams& params, const std::vector<std::size_t>& morphemes,
                              std::size_t max_len);

/// Central finite difference of `f` with respect to every element of `p`.
std::vector<double> numeric_gradient(ad::Parameter& p, const std::function<double()>& f, double step = 1e-5);

/// Relative error between backprop and finite-difference gradients of
/// -word_logprob for every parameter tensor, with the noise pinned to `noise`
/// (cycled draw by draw, restarted for each evaluation).
std::vector<std::pair<std::string, double>> end_to_end_gradient_errors(Variant variant, ModelParams& params,
                                                                       const LexiconEntry& entry,
                                                                       const std::vector<std::vector<double>>& noise,
                                                                       bool noise_per_step = true);

/// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
double relative_error(const std::vector<double>& a, const std::vector<double>& b);

/// Elementwise max of |a - b| / max(|a|, |b|, floor).
double max_elementwise_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-6);

/// Writes `text` to a fresh file under the test scratch directory and
/// returns its path.
std::string scratch_file(const std::string& name, const std::string& text);
std::string scratch_dir(const std::string& name);

/// Corpus in UniMorph TSV form (lemma = first morpheme, features = second).
std::string to_unimorph_tsv(const Corpus& corpus);
std::string to_weighted_tsv(const Corpus& corpus);

}  // namespace gradphon::testing
