#include "model/vocab.hpp"

#include "error.hpp"
#include "text.hpp"

namespace gradphon {
namespace {

const std::string kEos = "<EOS>";
const std::string kBos = "<BOS>";
const std::string kPad = "<PAD>";

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) fail(ErrorKind::Vocabulary, "alphabet contains an empty symbol");
    if (!index_.emplace(symbols_[i], i).second) fail(ErrorKind::Vocabulary, "duplicate alphabet symbol '" + symbols_[i] + "'");
  }
}

std::optional<std::size_t> Alphabet::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Alphabet::symbol(std::size_t index) const {
  if (index < size()) return symbols_[index];
  if (index == eos()) return kEos;
  if (index == bos()) return kBos;
  if (index == pad()) return kPad;
  fail(ErrorKind::Index, "symbol index " + std::to_string(index) + " outside alphabet of size " + std::to_string(size()));
}

std::vector<std::size_t> Alphabet::encode(std::string_view word) const {
  std::vector<std::size_t> out;
  std::string unknown;
  for (const std::string& sym : utf8_symbols(word)) {
    if (auto idx = find(sym)) {
      out.push_back(*idx);
    } else {
      if (!unknown.empty()) unknown += ' ';
      unknown += sym;
    }
  }
  if (!unknown.empty()) fail(ErrorKind::Vocabulary, "symbols not in alphabet: " + unknown);
  return out;
}

std::string Alphabet::decode(std::span<const std::size_t> indices) const {
  std::string out;
  for (std::size_t i : indices) {
    if (i >= size()) fail(ErrorKind::Index, "cannot decode reserved or out-of-range symbol index " + std::to_string(i));
    out += symbols_[i];
  }
  return out;
}

MorphemeVocab::MorphemeVocab(std::vector<std::string> identifiers) : ids_(std::move(identifiers)) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) fail(ErrorKind::Vocabulary, "duplicate morpheme '" + ids_[i] + "'");
  }
}

std::optional<std::size_t> MorphemeVocab::find(std::string_view identifier) const {
  auto it = index_.find(std::string(identifier));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t MorphemeVocab::index(std::string_view identifier) const {
  if (auto i = find(identifier)) return *i;
  fail(ErrorKind::UnknownMorpheme, "unknown morpheme '" + std::string(identifier) + "'");
}

}  // namespace gradphon
