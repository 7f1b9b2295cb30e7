#include "support/fixtures.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "rng.hpp"

#ifndef GP_TEST_SCRATCH
#define GP_TEST_SCRATCH "gradphon_test_scratch"
#endif

namespace gradphon::testing {
namespace {

const std::string kConsonants = "ptkmnslr";
const std::string kBack = "aou";
const std::string kFront = "eiy";

char pick(Rng& rng, const std::string& s) { return s[rng.below(s.size())]; }

// Realizes the archiphonemes A and U of a suffix after a stem of class cls.
std::string harmonize(const std::string& suffix, int cls) {
  std::string out;
  for (char c : suffix) {
    if (c == 'A') {
      out += cls == 0 ? 'a' : 'e';
    } else if (c == 'U') {
      out += cls == 0 ? 'u' : 'y';
    } else {
      out += c;
    }
  }
  return out;
}

std::vector<std::string> distinct_stems(Rng& rng, std::size_t n, const std::function<std::string(Rng&)>& make) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string s = make(rng);
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

}  // namespace

HarmonyLanguage harmony_language() {
  HarmonyLanguage lang;
  Rng rng(20180707);
  for (int cls = 0; cls < 2; ++cls) {
    const std::string& vowels = cls == 0 ? kBack : kFront;
    auto stems = distinct_stems(rng, 10, [&](Rng& r) {
      return std::string{pick(r, kConsonants), pick(r, vowels), pick(r, kConsonants), pick(r, vowels)};
    });
    for (auto& s : stems) {
      lang.stem_class[s] = cls;
      lang.stems.push_back(s);
    }
  }
  const std::vector<std::string> shapes{"lAr", "dA", "nUn", "sU", "mAk", "tUr", "kAn", "rUm", "pA", "lUk"};
  for (std::size_t j = 0; j < shapes.size(); ++j) lang.suffixes.push_back("SFX" + std::to_string(j));
  for (const auto& stem : lang.stems) {
    for (std::size_t j = 0; j < shapes.size(); ++j) {
      lang.corpus.push_back({stem + harmonize(shapes[j], lang.stem_class[stem]), {stem, lang.suffixes[j]}, 1});
    }
  }
  return lang;
}

Corpus overfit_forms() {
  Rng rng(50);
  const std::string voiceless = "ptks";
  const std::string other = "mnlr";
  auto stems = distinct_stems(rng, 10, [&](Rng& r) {
    const std::string& coda = r.below(2) ? voiceless : other;
    return std::string{pick(r, kConsonants), pick(r, "aeiou"), pick(r, coda)};
  });
  // Suffixes beginning with a voiced obstruent devoice after a voiceless coda.
  const std::vector<std::pair<std::string, std::string>> suffixes{
      {"PST", "da"}, {"PL", "zi"}, {"LOC", "bo"}, {"GEN", "in"}, {"DIM", "del"}};
  Corpus out;
  for (const auto& stem : stems) {
    const bool devoice = voiceless.find(stem.back()) != std::string::npos;
    for (const auto& [tag, shape] : suffixes) {
      std::string sfx = shape;
      if (devoice) {
        if (sfx[0] == 'd') sfx[0] = 't';
        if (sfx[0] == 'z') sfx[0] = 's';
        if (sfx[0] == 'b') sfx[0] = 'p';
      }
      out.push_back({stem + sfx, {stem, tag}, 1});
    }
  }
  return out;
}

Corpus weighted_corpus(std::size_t n_stems) {
  Rng rng(1995);
  auto stems = distinct_stems(rng, n_stems, [&](Rng& r) {
    const std::string& vowels = r.below(2) ? kBack : kFront;
    return std::string{pick(r, kConsonants), pick(r, vowels), pick(r, kConsonants), pick(r, vowels),
                       pick(r, kConsonants)};
  });
  const std::vector<std::pair<std::string, std::string>> affixes{
      {"", ""}, {"PL", "lAr"}, {"ACC", "U"}, {"LOC", "dA"}, {"ABL", "dAn"}};
  const std::vector<double> affix_weight{8, 4, 3, 2, 1};
  Corpus out;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    const std::string& stem = stems[i];
    const int cls = kFront.find(stem[3]) != std::string::npos ? 1 : 0;
    for (std::size_t j = 0; j < affixes.size(); ++j) {
      const auto& [tag, shape] = affixes[j];
      Form f;
      f.surface = stem + harmonize(shape, cls);
      f.morphemes = tag.empty() ? std::vector<std::string>{stem} : std::vector<std::string>{stem, tag};
      f.count = static_cast<std::uint64_t>(std::lround(400.0 * affix_weight[j] / static_cast<double>(i + 1)));
      out.push_back(std::move(f));
    }
  }
  return out;
}

Corpus english_toy() {
  const std::vector<std::array<std::string, 3>> rows{
      {"run", "ran", "V;PST"},      {"run", "runs", "V;3;SG;PRS"},   {"run", "running", "V;V.PTCP;PRS"},
      {"walk", "walked", "V;PST"},  {"walk", "walks", "V;3;SG;PRS"}, {"walk", "walking", "V;V.PTCP;PRS"},
      {"jump", "jumped", "V;PST"},  {"jump", "jumps", "V;3;SG;PRS"}, {"jump", "jumping", "V;V.PTCP;PRS"},
      {"talk", "talked", "V;PST"},  {"talk", "talks", "V;3;SG;PRS"}, {"talk", "talking", "V;V.PTCP;PRS"},
  };
  Corpus out;
  for (const auto& [lemma, form, feats] : rows) out.push_back({form, {lemma, feats}, 1});
  return out;
}

ModelParams random_params(ModelDims dims, std::uint64_t seed, double sd) {
  ModelParams p(dims);
  Rng rng(seed);
  for (ad::Parameter* t : p.all()) {
    for (double& v : t->value) v = sd * rng.normal();
  }
  return p;
}

double total_probability_mass(Variant variant, const ModelParams& params, const std::vector<std::size_t>& morphemes,
                              std::size_t max_len) {
  const std::size_t sigma = params.dims().symbols;
  double complete = 0;
  // Every string of length 0..max_len, scored as a whole word.
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::vector<std::size_t> s(len, 0);
    while (true) {
      complete += std::exp(word_logprob(variant, LexiconEntry{morphemes, s, 1}, params));
      std::size_t pos = 0;
      while (pos < len && ++s[pos] == sigma) s[pos++] = 0;
      if (pos == len) break;
    }
  }
  // Prefixes of length max_len + 1: product of per-step probabilities.
  double continuation = 0;
  std::function<void(ad::Tape&, Network&, Network::Word, std::size_t, std::size_t, double)> walk =
      [&](ad::Tape& tape, Network& net, Network::Word word, std::size_t prev, std::size_t depth, double logp) {
        if (depth == max_len + 1) {
          continuation += std::exp(logp);
          return;
        }
        const auto dist = net.next_distribution(word, prev);
        const std::vector<double> values(dist.values().begin(), dist.values().end());
        for (std::size_t c = 0; c < sigma; ++c) walk(tape, net, word, c, depth + 1, logp + values[c]);
      };
  ad::Tape tape;
  Network net(tape, params, variant);
  walk(tape, net, net.begin_word(morphemes), net.bos(), 0, 0.0);
  return complete + continuation;
}

std::vector<double> numeric_gradient(ad::Parameter& p, const std::function<double()>& f, double step) {
  std::vector<double> g(p.value.size());
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    const double saved = p.value[i];
    p.value[i] = saved + step;
    const double up = f();
    p.value[i] = saved - step;
    const double down = f();
    p.value[i] = saved;
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

std::vector<std::pair<std::string, double>> end_to_end_gradient_errors(Variant variant, ModelParams& params,
                                                                       const LexiconEntry& entry,
                                                                       const std::vector<std::vector<double>>& noise,
                                                                       bool noise_per_step) {
  auto options = [&] {
    ForwardOptions o;
    o.noise = noise.empty() ? NoiseSource::mean() : NoiseSource::fixed(noise);
    o.noise_per_step = noise_per_step;
    return o;
  };
  auto loss = [&] {
    ad::Tape tape;
    Network net(tape, std::as_const(params), variant, options());
    return -net.word_logprob(entry).item();
  };
  params.zero_grad();
  {
    ad::Tape tape;
    Network net(tape, params, variant, options());
    tape.backward(net.word_logprob(entry), -1.0);
  }
  std::vector<std::pair<std::string, double>> out;
  for (ad::Parameter* p : params.all()) {
    const std::vector<double> analytic = p->grad;
    out.emplace_back(p->name, relative_error(analytic, numeric_gradient(*p, loss)));
  }
  return out;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(std::max(na, nb));
  return denom == 0 ? 0 : std::sqrt(diff) / denom;
}

double max_elementwise_error(const std::vector<double>& a, const std::vector<double>& b, double floor) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

std::string scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(GP_TEST_SCRATCH) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string scratch_file(const std::string& name, const std::string& text) {
  const std::filesystem::path base(GP_TEST_SCRATCH);
  std::filesystem::create_directories(base);
  const std::string path = (base / name).string();
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string to_unimorph_tsv(const Corpus& corpus) {
  std::ostringstream out;
  for (const Form& f : corpus) out << f.morphemes.at(0) << '\t' << f.surface << '\t' << f.morphemes.at(1) << '\n';
  return out.str();
}

std::string to_weighted_tsv(const Corpus& corpus) {
  std::ostringstream out;
  for (const Form& f : corpus) {
    out << f.surface << '\t' << f.morphemes.at(0) << '\t' << (f.morphemes.size() > 1 ? f.morphemes[1] : "∅") << '\t'
        << f.count << '\n';
  }
  return out.str();
}

}  // namespace gradphon::testing
