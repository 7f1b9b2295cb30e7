#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model/params.hpp"
#include "model/vocab.hpp"

namespace gradphon {

/// A trained model together with everything needed to use it.
///
/// Binary layout, all integers little-endian:
///
///     "GPHCKPT\0"                          8-byte magic
///     u32 format version                   (currently 1)
///     str variant tag                      pos-indep | pos-dep | joint
///     u32 d
///     u32 max decode length
///     u32 |Sigma|, then |Sigma| x str      surface alphabet in index order
///     u32 |M|, then |M| x str              morpheme identifiers in index order
///     u32 tensor count, then per tensor:
///       str name, u32 rank, rank x u32 dims, prod(dims) x f32 values
///
/// where str is a u32 byte length followed by UTF-8 bytes.
struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  Variant variant = Variant::PositionIndependent;
  std::size_t max_decode_len = 0;
  Alphabet alphabet;
  MorphemeVocab morphemes;
  /// Values are always exactly representable as 32-bit floats.
  ModelParams params;

  /// Copies `params`, rounding them to checkpoint precision.
  static Checkpoint capture(Variant variant, std::size_t max_decode_len, Alphabet alphabet, MorphemeVocab morphemes,
                            const ModelParams& params);

  std::vector<std::uint8_t> to_bytes() const;
  /// Throws Error(Format) naming the offending field.
  static Checkpoint from_bytes(const std::vector<std::uint8_t>& bytes);

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace gradphon
