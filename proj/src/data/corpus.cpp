#include "data/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "error.hpp"
#include "rng.hpp"
#include "text.hpp"

namespace gradphon {
namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return in;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

ParadigmTable parse_unimorph(std::istream& in, const std::string& source) {
  ParadigmTable table;
  std::set<std::pair<std::string, std::string>> seen_slots;
  std::set<std::string> chars;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3) {
      fail(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": expected 3 tab-separated columns, found " +
                                 std::to_string(cols.size()));
    }
    RawParadigmRow row{std::string(trim(cols[0])), std::string(trim(cols[1])), std::string(trim(cols[2]))};
    if (row.lemma.empty() || row.form.empty() || row.features.empty()) {
      fail(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": empty field");
    }
    if (!seen_slots.emplace(row.lemma, row.features).second) continue;
    for (auto& c : utf8_symbols(row.form)) chars.insert(std::move(c));
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) fail(ErrorKind::Data, source + ": no paradigm rows");
  table.characters.assign(chars.begin(), chars.end());
  return table;
}

ParadigmTable parse_unimorph_tsv(const std::string& path) {
  auto in = open_input(path);
  return parse_unimorph(in, path);
}

std::vector<std::string> decompose(const RawParadigmRow& row) { return {row.lemma, row.features}; }

Corpus to_corpus(const ParadigmTable& table) {
  Corpus corpus;
  corpus.reserve(table.rows.size());
  for (const auto& row : table.rows) corpus.push_back({row.form, decompose(row), 0});
  return corpus;
}

Corpus parse_weighted(std::istream& in, const std::string& source) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (cols.size() != 4) {
      fail(ErrorKind::Parse, where + "expected 4 tab-separated columns, found " + std::to_string(cols.size()));
    }
    Form form;
    form.surface = std::string(trim(cols[0]));
    const std::string stem(trim(cols[1]));
    const std::string affix(trim(cols[2]));
    const std::string_view count = trim(cols[3]);
    if (form.surface.empty() || stem.empty()) fail(ErrorKind::Parse, where + "empty form or stem");
    auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), form.count);
    if (ec != std::errc() || ptr != count.data() + count.size()) {
      fail(ErrorKind::Parse, where + "token count '" + std::string(count) + "' is not a nonnegative integer");
    }
    form.morphemes.push_back(stem);
    if (!affix.empty() && affix != "∅" && affix != "-") form.morphemes.push_back(affix);
    corpus.push_back(std::move(form));
  }
  if (corpus.empty()) fail(ErrorKind::Data, source + ": no forms");
  return corpus;
}

Corpus parse_weighted_tsv(const std::string& path) {
  auto in = open_input(path);
  return parse_weighted(in, path);
}

Corpus load_corpus(const std::string& path, CorpusFormat format) {
  return format == CorpusFormat::UniMorph ? to_corpus(parse_unimorph_tsv(path)) : parse_weighted_tsv(path);
}

std::vector<std::size_t> sample_training_set(std::span<const Form> corpus, std::size_t k, std::uint64_t seed) {
  if (k > corpus.size()) {
    fail(ErrorKind::Config, "cannot sample " + std::to_string(k) + " forms from a corpus of " +
                                std::to_string(corpus.size()));
  }
  std::vector<std::size_t> remaining(corpus.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  double total = 0;
  for (const Form& f : corpus) total += static_cast<double>(f.count);
  if (!corpus.empty() && total <= 0) fail(ErrorKind::Data, "all token counts are zero");

  Rng rng(seed);
  std::vector<std::size_t> picked;
  picked.reserve(k);
  for (std::size_t draw = 0; draw < k; ++draw) {
    double mass = 0;
    for (std::size_t idx : remaining) mass += static_cast<double>(corpus[idx].count);
    std::size_t pos = remaining.size() - 1;
    if (mass > 0) {
      const double target = rng.uniform() * mass;
      double acc = 0;
      for (std::size_t j = 0; j < remaining.size(); ++j) {
        acc += static_cast<double>(corpus[remaining[j]].count);
        if (target < acc) {
          pos = j;
          break;
        }
      }
    } else {
      // Only zero-count forms are left; they are equally likely.
      pos = static_cast<std::size_t>(rng.below(remaining.size()));
    }
    picked.push_back(remaining[pos]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return picked;
}

Split split_paradigms(std::span<const Form> corpus, const SplitSpec& spec) {
  if (!(spec.train > 0 && spec.dev > 0 && spec.test > 0) || std::abs(spec.train + spec.dev + spec.test - 1.0) > 1e-9) {
    fail(ErrorKind::Config, "split fractions must be positive and sum to 1");
  }
  const std::size_t n = corpus.size();
  const auto quota = [&](double f) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(f * n))); };
  const std::size_t want_dev = quota(spec.dev);
  const std::size_t want_test = quota(spec.test);

  // Number of not-yet-held-out slots containing each morpheme.
  std::map<std::string, std::size_t> available;
  std::vector<std::vector<std::string>> slot_morphemes(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> uniq(corpus[i].morphemes.begin(), corpus[i].morphemes.end());
    slot_morphemes[i].assign(uniq.begin(), uniq.end());
    for (const auto& m : slot_morphemes[i]) ++available[m];
  }
  const auto list_uncoverable = [&](const auto& candidates) {
    std::string listed;
    std::size_t shown = 0;
    for (const auto& m : candidates) {
      if (available[m] >= 2) continue;
      if (shown++ == 20) {
        listed += " ...";
        break;
      }
      listed += (listed.empty() ? "" : ", ") + m;
    }
    return listed;
  };
  if (n < want_dev + want_test + 1) {
    std::vector<std::string> all;
    for (const auto& [m, count] : available) all.push_back(m);
    fail(ErrorKind::Split, "corpus of " + std::to_string(n) + " slots is too small to hold out dev and test slots" +
                               (spec.coverage ? "; uncoverable morphemes: " + list_uncoverable(all) : std::string()));
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(spec.seed);
  rng.shuffle(order.begin(), order.end());

  Split split;
  std::set<std::string> blocking;
  for (std::size_t idx : order) {
    const bool want_more = split.dev.size() < want_dev || split.test.size() < want_test;
    bool can_hold_out = want_more;
    if (can_hold_out && spec.coverage) {
      for (const auto& m : slot_morphemes[idx]) {
        if (available[m] < 2) {
          can_hold_out = false;
          blocking.insert(m);
        }
      }
    }
    if (!can_hold_out) {
      split.train.push_back(idx);
      continue;
    }
    for (const auto& m : slot_morphemes[idx]) --available[m];
    (split.dev.size() < want_dev ? split.dev : split.test).push_back(idx);
  }
  if (split.dev.size() < want_dev || split.test.size() < want_test) {
    fail(ErrorKind::Split, "cannot hold out " + std::to_string(want_dev) + " dev and " + std::to_string(want_test) +
                               " test slots while keeping every morpheme in train; uncoverable morphemes: " +
                               list_uncoverable(blocking));
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.dev.begin(), split.dev.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Vocabulary build_vocab(std::span<const Form> corpus) {
  if (corpus.empty()) fail(ErrorKind::Data, "cannot build a vocabulary from an empty corpus");
  std::set<std::string> symbols, morphemes;
  for (const Form& f : corpus) {
    for (auto& s : utf8_symbols(f.surface)) symbols.insert(std::move(s));
    morphemes.insert(f.morphemes.begin(), f.morphemes.end());
  }
  return {Alphabet({symbols.begin(), symbols.end()}), MorphemeVocab({morphemes.begin(), morphemes.end()})};
}

LexiconEntry encode(const Form& form, const Vocabulary& vocab) {
  LexiconEntry e;
  e.surface = vocab.alphabet.encode(form.surface);
  if (e.surface.empty()) fail(ErrorKind::Data, "empty surface form");
  if (form.morphemes.empty()) fail(ErrorKind::Data, "form '" + form.surface + "' has no morphemes");
  for (const auto& m : form.morphemes) e.morphemes.push_back(vocab.morphemes.index(m));
  e.count = form.count;
  return e;
}

std::vector<LexiconEntry> encode_all(std::span<const Form> corpus, std::span<const std::size_t> indices,
                                     const Vocabulary& vocab) {
  std::vector<LexiconEntry> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= corpus.size()) fail(ErrorKind::Index, "row index " + std::to_string(i) + " outside corpus of " + std::to_string(corpus.size()));
    out.push_back(encode(corpus[i], vocab));
  }
  return out;
}

void write_split_manifest(const std::string& dir, const Split& split, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::vector<std::size_t>& idx) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
    out << "# seed " << seed << '\n';
    for (std::size_t i : idx) out << i << '\n';
  };
  write("split_train.txt", split.train);
  write("split_dev.txt", split.dev);
  write("split_test.txt", split.test);
}

Split read_split_manifest(const std::string& dir) {
  auto read = [&](const char* name) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    auto in = open_input(path);
    std::vector<std::size_t> idx;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size()) {
        fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": not a row index");
      }
      idx.push_back(v);
    }
    return idx;
  };
  return {read("split_train.txt"), read("split_dev.txt"), read("split_test.txt")};
}

}  // namespace gradphon
