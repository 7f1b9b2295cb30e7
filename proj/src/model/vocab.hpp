#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gradphon {

/// Surface alphabet. Data symbols occupy indices [0, size()); the reserved
/// EOS, BOS and PAD symbols follow, so the readout's output space
/// (symbols plus EOS) is the index prefix [0, size()].
class Alphabet {
 public:
  Alphabet() = default;
  /// Symbols must be unique; order is kept as given.
  explicit Alphabet(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  std::size_t eos() const { return size(); }
  std::size_t bos() const { return size() + 1; }
  std::size_t pad() const { return size() + 2; }
  std::size_t output_size() const { return size() + 1; }
  std::size_t embedding_rows() const { return size() + 3; }

  std::optional<std::size_t> find(std::string_view symbol) const;
  const std::string& symbol(std::size_t index) const;
  const std::vector<std::string>& symbols() const { return symbols_; }

  /// Encodes a word code point by code point; throws Error(Vocabulary)
  /// naming every symbol outside the alphabet.
  std::vector<std::size_t> encode(std::string_view word) const;
  std::string decode(std::span<const std::size_t> indices) const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Abstract-morpheme inventory: each identifier (a lemma key or a feature
/// bundle) owns one row of the morpheme embedding table.
class MorphemeVocab {
 public:
  MorphemeVocab() = default;
  explicit MorphemeVocab(std::vector<std::string> identifiers);

  std::size_t size() const { return ids_.size(); }
  std::optional<std::size_t> find(std::string_view identifier) const;
  std::size_t index(std::string_view identifier) const;
  const std::string& identifier(std::size_t index) const { return ids_.at(index); }
  const std::vector<std::string>& identifiers() const { return ids_; }

  bool operator==(const MorphemeVocab& other) const { return ids_ == other.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One observed word: its abstract morphemes and its surface symbols
/// (without BOS/EOS).
struct LexiconEntry {
  std::vector<std::size_t> morphemes;
  std::vector<std::size_t> surface;
  std::uint64_t count = 0;
};

}  // namespace gradphon
