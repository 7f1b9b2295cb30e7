#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "autodiff/tensor.hpp"
#include "rng.hpp"

namespace gradphon {

enum class Variant { PositionIndependent, PositionDependent, Joint };

std::string_view variant_tag(Variant v);
std::optional<Variant> parse_variant(std::string_view tag);

struct ModelDims {
  std::size_t dim = 200;
  std::size_t symbols = 0;    // |Sigma|, reserved symbols excluded
  std::size_t morphemes = 0;
};

/// Every learnable tensor of the model. The attention matrix exists for all
/// variants; it simply receives no gradient under PositionIndependent.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(ModelDims dims);

  const ModelDims& dims() const { return dims_; }

  /// Weight matrices ~ N(0, 0.01), biases 0, embeddings ~ N(0, 1).
  void initialize(Rng& rng);
  void zero_grad();

  std::vector<ad::Parameter*> all();
  std::vector<const ad::Parameter*> all() const;
  ad::Parameter* find(std::string_view name);

  /// Rounds every value to the nearest 32-bit float (checkpoint precision).
  void quantize_to_float();

  ad::Parameter morpheme_embedding;  // |M| x d
  ad::Parameter char_embedding;      // (|Sigma| + 3) x d
  ad::Parameter lstm_input;          // 4d x d, gate blocks i, f, g, o
  ad::Parameter lstm_hidden;         // 4d x d
  ad::Parameter lstm_bias;           // 4d
  ad::Parameter readout_w;           // 2d x 2d
  ad::Parameter readout_v;           // (|Sigma| + 1) x 2d
  ad::Parameter attention_t;         // d x d

 private:
  ModelDims dims_;
};

}  // namespace gradphon
