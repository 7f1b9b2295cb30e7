#include "model/params.hpp"

#include <cmath>

namespace gradphon {

std::string_view variant_tag(Variant v) {
  switch (v) {
    case Variant::PositionIndependent: return "pos-indep";
    case Variant::PositionDependent: return "pos-dep";
    case Variant::Joint: return "joint";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view tag) {
  if (tag == "pos-indep") return Variant::PositionIndependent;
  if (tag == "pos-dep") return Variant::PositionDependent;
  if (tag == "joint") return Variant::Joint;
  return std::nullopt;
}

ModelParams::ModelParams(ModelDims dims)
    : morpheme_embedding("morpheme_embedding", {dims.morphemes, dims.dim}),
      char_embedding("char_embedding", {dims.symbols + 3, dims.dim}),
      lstm_input("lstm.weight_ih", {4 * dims.dim, dims.dim}),
      lstm_hidden("lstm.weight_hh", {4 * dims.dim, dims.dim}),
      lstm_bias("lstm.bias", {4 * dims.dim}),
      readout_w("readout.W", {2 * dims.dim, 2 * dims.dim}),
      readout_v("readout.V", {dims.symbols + 1, 2 * dims.dim}),
      attention_t("attention.T", {dims.dim, dims.dim}),
      dims_(dims) {}

void ModelParams::initialize(Rng& rng) {
  const double weight_sd = 0.1;  // variance 0.01
  for (auto& v : morpheme_embedding.value) v = rng.normal();
  for (auto& v : char_embedding.value) v = rng.normal();
  for (ad::Parameter* p : {&lstm_input, &lstm_hidden, &readout_w, &readout_v, &attention_t}) {
    for (auto& v : p->value) v = weight_sd * rng.normal();
  }
  std::fill(lstm_bias.value.begin(), lstm_bias.value.end(), 0.0);
}

void ModelParams::zero_grad() {
  for (ad::Parameter* p : all()) p->zero_grad();
}

std::vector<ad::Parameter*> ModelParams::all() {
  return {&morpheme_embedding, &char_embedding, &lstm_input, &lstm_hidden,
          &lstm_bias,          &readout_w,      &readout_v,  &attention_t};
}

std::vector<const ad::Parameter*> ModelParams::all() const {
  return {&morpheme_embedding, &char_embedding, &lstm_input, &lstm_hidden,
          &lstm_bias,          &readout_w,      &readout_v,  &attention_t};
}

ad::Parameter* ModelParams::find(std::string_view name) {
  for (ad::Parameter* p : all())
    if (p->name == name) return p;
  return nullptr;
}

void ModelParams::quantize_to_float() {
  for (ad::Parameter* p : all())
    for (auto& v : p->value) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace gradphon
