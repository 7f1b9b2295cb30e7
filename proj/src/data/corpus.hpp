#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "model/vocab.hpp"

namespace gradphon {

/// One line of a UniMorph paradigm file.
struct RawParadigmRow {
  std::string lemma;
  std::string form;
  std::string features;
};

struct ParadigmTable {
  std::vector<RawParadigmRow> rows;
  /// Sorted distinct code points of all inflected forms.
  std::vector<std::string> characters;
};

/// Reads lemma<TAB>form<TAB>features lines (LF or CRLF). Blank lines are
/// skipped; repeated (lemma, features) slots keep their first row.
ParadigmTable parse_unimorph(std::istream& in, const std::string& source = "<stream>");
ParadigmTable parse_unimorph_tsv(const std::string& path);

/// Abstract morphemes of a paradigm row: the lemma key and the whole feature
/// bundle as a single atomic morpheme.
std::vector<std::string> decompose(const RawParadigmRow& row);

/// A surface form with its morpheme decomposition and token count. Both
/// corpus formats are loaded into this shape.
struct Form {
  std::string surface;
  std::vector<std::string> morphemes;
  std::uint64_t count = 0;
};

using Corpus = std::vector<Form>;

Corpus to_corpus(const ParadigmTable& table);

/// Reads the weighted format form<TAB>stem<TAB>affix<TAB>count, where the
/// affix column is "∅" (or "-") for an empty affix.
Corpus parse_weighted(std::istream& in, const std::string& source = "<stream>");
Corpus parse_weighted_tsv(const std::string& path);

enum class CorpusFormat { UniMorph, Weighted };
Corpus load_corpus(const std::string& path, CorpusFormat format);

/// Weighted sampling without replacement: k sequential draws, each
/// proportional to the normalized counts of the items still remaining.
/// Returns corpus indices in draw order.
std::vector<std::size_t> sample_training_set(std::span<const Form> corpus, std::size_t k, std::uint64_t seed);

struct SplitSpec {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
  /// Keep every dev/test morpheme represented in train.
  bool coverage = true;
};

struct Split {
  std::vector<std::size_t> train, dev, test;
};

/// Randomly partitions corpus slots into train/dev/test.
Split split_paradigms(std::span<const Form> corpus, const SplitSpec& spec);

struct Vocabulary {
  Alphabet alphabet;
  MorphemeVocab morphemes;
};

/// Alphabet and morpheme inventory over the whole corpus, each sorted.
Vocabulary build_vocab(std::span<const Form> corpus);

LexiconEntry encode(const Form& form, const Vocabulary& vocab);
std::vector<LexiconEntry> encode_all(std::span<const Form> corpus, std::span<const std::size_t> indices,
                                     const Vocabulary& vocab);

/// Split manifest: split_train.txt, split_dev.txt, split_test.txt in `dir`,
/// each a "# seed <n>" header followed by one corpus row index per line.
void write_split_manifest(const std::string& dir, const Split& split, std::uint64_t seed);
Split read_split_manifest(const std::string& dir);

}  // namespace gradphon
