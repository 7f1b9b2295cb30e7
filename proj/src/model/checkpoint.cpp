#include "model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "error.hpp"

namespace gradphon {
namespace {

constexpr char kMagic[8] = {'G', 'P', 'H', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
  }
  void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }

  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void need(std::size_t n, const std::string& field) {
    if (bytes_.size() - pos_ < n) fail(ErrorKind::Format, "checkpoint truncated while reading " + field);
  }
  std::uint32_t u32(const std::string& field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string str(const std::string& field) {
    const std::uint32_t n = u32(field + " length");
    need(n, field);
    std::string s(bytes_.begin() + pos_, bytes_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  float f32(const std::string& field) { return std::bit_cast<float>(u32(field)); }
  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Checkpoint Checkpoint::capture(Variant variant, std::size_t max_decode_len, Alphabet alphabet,
                               MorphemeVocab morphemes, const ModelParams& params) {
  Checkpoint c;
  c.variant = variant;
  c.max_decode_len = max_decode_len;
  c.alphabet = std::move(alphabet);
  c.morphemes = std::move(morphemes);
  c.params = params;
  c.params.quantize_to_float();
  return c;
}

std::vector<std::uint8_t> Checkpoint::to_bytes() const {
  Writer w;
  w.out.insert(w.out.end(), std::begin(kMagic), std::end(kMagic));
  w.u32(kFormatVersion);
  w.str(std::string(variant_tag(variant)));
  w.u32(static_cast<std::uint32_t>(params.dims().dim));
  w.u32(static_cast<std::uint32_t>(max_decode_len));
  w.u32(static_cast<std::uint32_t>(alphabet.size()));
  for (const auto& s : alphabet.symbols()) w.str(s);
  w.u32(static_cast<std::uint32_t>(morphemes.size()));
  for (const auto& m : morphemes.identifiers()) w.str(m);
  const auto tensors = params.all();
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const ad::Parameter* p : tensors) {
    w.str(p->name);
    w.u32(static_cast<std::uint32_t>(p->shape.size()));
    for (auto dim : p->shape) w.u32(static_cast<std::uint32_t>(dim));
    for (double v : p->value) w.f32(static_cast<float>(v));
  }
  return std::move(w.out);
}

Checkpoint Checkpoint::from_bytes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorKind::Format, "checkpoint field 'magic': not a checkpoint file");
  }
  std::vector<std::uint8_t> body(bytes.begin() + sizeof(kMagic), bytes.end());
  Reader r(body);
  const std::uint32_t version = r.u32("format version");
  if (version != kFormatVersion) {
    fail(ErrorKind::Format, "checkpoint field 'format version': unsupported version " + std::to_string(version));
  }
  Checkpoint c;
  const std::string tag = r.str("variant tag");
  const auto variant = parse_variant(tag);
  if (!variant) fail(ErrorKind::Format, "checkpoint field 'variant tag': unknown variant '" + tag + "'");
  c.variant = *variant;
  const std::uint32_t dim = r.u32("d");
  if (dim == 0) fail(ErrorKind::Format, "checkpoint field 'd': must be positive");
  c.max_decode_len = r.u32("max decode length");

  auto read_list = [&](const std::string& field) {
    const std::uint32_t n = r.u32(field + " count");
    if (n > r.remaining()) fail(ErrorKind::Format, "checkpoint field '" + field + " count': implausible value");
    std::vector<std::string> items;
    items.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) items.push_back(r.str(field));
    return items;
  };
  try {
    c.alphabet = Alphabet(read_list("alphabet"));
    c.morphemes = MorphemeVocab(read_list("morpheme vocabulary"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Format) throw;
    fail(ErrorKind::Format, std::string("checkpoint vocabulary: ") + e.what());
  }

  c.params = ModelParams({dim, c.alphabet.size(), c.morphemes.size()});
  const std::uint32_t count = r.u32("tensor count");
  const auto expected = c.params.all();
  if (count != expected.size()) {
    fail(ErrorKind::Format, "checkpoint field 'tensor count': expected " + std::to_string(expected.size()) + ", got " +
                                std::to_string(count));
  }
  std::vector<bool> seen(expected.size(), false);
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::string name = r.str("tensor name");
    ad::Parameter* p = c.params.find(name);
    if (!p) fail(ErrorKind::Format, "checkpoint tensor '" + name + "': unknown tensor name");
    const auto slot = static_cast<std::size_t>(std::find(expected.begin(), expected.end(), p) - expected.begin());
    if (seen[slot]) fail(ErrorKind::Format, "checkpoint tensor '" + name + "': duplicated");
    seen[slot] = true;
    const std::uint32_t rank = r.u32("tensor '" + name + "' rank");
    ad::Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(r.u32("tensor '" + name + "' dims"));
    if (shape != p->shape) {
      fail(ErrorKind::Format, "checkpoint tensor '" + name + "': shape " + ad::shape_str(shape) + " does not match expected " +
                                  ad::shape_str(p->shape));
    }
    const std::string values_field = "tensor '" + name + "' values";
    for (auto& v : p->value) {
      v = r.f32(values_field);
      if (!std::isfinite(v)) fail(ErrorKind::Format, "checkpoint tensor '" + name + "': non-finite value");
    }
  }
  if (!r.at_end()) fail(ErrorKind::Format, "checkpoint: trailing bytes after last tensor");
  return c;
}

void Checkpoint::save(const std::string& path) const {
  const auto bytes = to_bytes();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open checkpoint '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_bytes(bytes);
}

}  // namespace gradphon
