#include "autodiff/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace gradphon::ad {
namespace {

using RowMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using MatMap = Eigen::Map<RowMatrix>;

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  fail(ErrorKind::Dimension, std::string(op) + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

void same_tape(const Tensor& a, const Tensor& b) {
  if (&a.tape() != &b.tape()) fail(ErrorKind::Dimension, "operands recorded on different tapes");
}

std::vector<Real> copy_values(const Tensor& x) {
  auto v = x.values();
  return {v.begin(), v.end()};
}

void accumulate(std::span<Real> dst, std::span<const Real> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

// How the smaller operand of an elementwise op lines up with the larger one.
enum class Broadcast { Same, RowsOfA, RowsOfB };

Broadcast broadcast_mode(const char* op, const Shape& a, const Shape& b) {
  if (a == b) return Broadcast::Same;
  if (a.size() == 2 && b.size() == 1 && a[1] == b[0]) return Broadcast::RowsOfA;
  if (b.size() == 2 && a.size() == 1 && b[1] == a[0]) return Broadcast::RowsOfB;
  shape_error(op, a, b);
}

enum class BinaryKind { Add, Sub, Mul };

Tensor binary(const char* name, BinaryKind kind, const Tensor& a, const Tensor& b) {
  same_tape(a, b);
  const Broadcast mode = broadcast_mode(name, a.shape(), b.shape());
  const Shape out_shape = mode == Broadcast::RowsOfB ? b.shape() : a.shape();
  const std::size_t n = numel(out_shape);
  // Width of the broadcast vector; index of the broadcast operand is i % width.
  const std::size_t width = mode == Broadcast::Same ? n : out_shape[1];
  auto av = a.values();
  auto bv = b.values();
  auto ai = [&](std::size_t i) { return mode == Broadcast::RowsOfB ? i % width : i; };
  auto bi = [&](std::size_t i) { return mode == Broadcast::RowsOfA ? i % width : i; };

  std::vector<Real> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Real x = av[ai(i)], y = bv[bi(i)];
    out[i] = kind == BinaryKind::Add ? x + y : kind == BinaryKind::Sub ? x - y : x * y;
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(out_shape, std::move(out), {ia, ib}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto ga = t.grad(ia);
    {
      auto bvals = t.values(ib);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = mode == Broadcast::RowsOfB ? i % width : i;
        const std::size_t k = mode == Broadcast::RowsOfA ? i % width : i;
        ga[j] += kind == BinaryKind::Mul ? g[i] * bvals[k] : g[i];
      }
    }
    auto gb = t.grad(ib);
    auto avals = t.values(ia);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = mode == Broadcast::RowsOfB ? i % width : i;
      const std::size_t k = mode == Broadcast::RowsOfA ? i % width : i;
      gb[k] += kind == BinaryKind::Mul ? g[i] * avals[j] : kind == BinaryKind::Sub ? -g[i] : g[i];
    }
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  same_tape(a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.empty() || sa.size() > 2 || sb.empty() || sb.size() > 2) shape_error("matmul", sa, sb);
  const std::size_t m = sa.size() == 2 ? sa[0] : 1;
  const std::size_t k = sa.size() == 2 ? sa[1] : sa[0];
  const std::size_t kb = sb[0];
  const std::size_t n = sb.size() == 2 ? sb[1] : 1;
  if (k != kb) shape_error("matmul", sa, sb);

  Shape out_shape;
  if (sa.size() == 2) out_shape.push_back(m);
  if (sb.size() == 2) out_shape.push_back(n);

  std::vector<Real> out(m * n);
  MatMap(out.data(), m, n).noalias() = ConstMatMap(a.values().data(), m, k) * ConstMatMap(b.values().data(), k, n);

  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out_shape), std::move(out), {ia, ib}, [=](Tape& t, std::size_t self) {
    ConstMatMap g(t.grad_view(self).data(), m, n);
    {
      MatMap ga(t.grad(ia).data(), m, k);
      ga.noalias() += g * ConstMatMap(t.values(ib).data(), k, n).transpose();
    }
    MatMap gb(t.grad(ib).data(), k, n);
    gb.noalias() += ConstMatMap(t.values(ia).data(), m, k).transpose() * g;
  });
}

Tensor add(const Tensor& a, const Tensor& b) { return binary("add", BinaryKind::Add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary("sub", BinaryKind::Sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary("mul", BinaryKind::Mul, a, b); }

Tensor scale(const Tensor& x, Real factor) {
  std::vector<Real> out = copy_values(x);
  for (auto& v : out) v *= factor;
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto gx = t.grad(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += factor * g[i];
  });
}

Tensor tanh(const Tensor& x) {
  std::vector<Real> out = copy_values(x);
  for (auto& v : out) v = std::tanh(v);
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto y = t.values(self);
    auto gx = t.grad(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Tensor sigmoid(const Tensor& x) {
  std::vector<Real> out = copy_values(x);
  for (auto& v : out) v = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto y = t.values(self);
    auto gx = t.grad(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Tensor exp(const Tensor& x) {
  std::vector<Real> out = copy_values(x);
  for (auto& v : out) v = std::exp(v);
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto y = t.values(self);
    auto gx = t.grad(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i];
  });
}

Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis) {
  same_tape(a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != sb.size() || sa.empty() || sa.size() > 2 || axis >= sa.size()) shape_error("concat", sa, sb);
  if (sa.size() == 2 && sa[1 - axis] != sb[1 - axis]) shape_error("concat", sa, sb);

  Shape out_shape = sa;
  out_shape[axis] += sb[axis];
  auto av = a.values();
  auto bv = b.values();
  // Rows of a and b interleave when joining columns; otherwise b simply follows a.
  const std::size_t rows = (sa.size() == 2 && axis == 1) ? sa[0] : 1;
  const std::size_t wa = av.size() / std::max<std::size_t>(rows, 1);
  const std::size_t wb = bv.size() / std::max<std::size_t>(rows, 1);
  std::vector<Real> out;
  out.reserve(av.size() + bv.size());
  for (std::size_t r = 0; r < rows; ++r) {
    out.insert(out.end(), av.begin() + r * wa, av.begin() + (r + 1) * wa);
    out.insert(out.end(), bv.begin() + r * wb, bv.begin() + (r + 1) * wb);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out_shape), std::move(out), {ia, ib}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    {
      auto ga = t.grad(ia);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < wa; ++j) ga[r * wa + j] += g[r * (wa + wb) + j];
    }
    auto gb = t.grad(ib);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < wb; ++j) gb[r * wb + j] += g[r * (wa + wb) + wa + j];
  });
}

Tensor slice(const Tensor& x, std::size_t begin, std::size_t length) {
  if (x.rank() != 1 || begin + length > x.shape()[0]) {
    fail(ErrorKind::Dimension, "slice [" + std::to_string(begin) + ", " + std::to_string(begin + length) +
                                   ") out of range for " + shape_str(x.shape()));
  }
  auto v = x.values();
  std::vector<Real> out(v.begin() + begin, v.begin() + begin + length);
  const std::size_t ix = x.id();
  return x.tape().record({length}, std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto gx = t.grad(ix);
    for (std::size_t i = 0; i < length; ++i) gx[begin + i] += g[i];
  });
}

Tensor log_softmax(const Tensor& x) {
  if (x.rank() != 1 || x.size() == 0) fail(ErrorKind::Dimension, "log_softmax needs a non-empty vector, got " + shape_str(x.shape()));
  auto v = x.values();
  Real mx = -std::numeric_limits<Real>::infinity();
  for (Real e : v) {
    if (!std::isfinite(e)) fail(ErrorKind::Numeric, "log_softmax: non-finite input");
    mx = std::max(mx, e);
  }
  Real total = 0;
  for (Real e : v) total += std::exp(e - mx);
  const Real lse = mx + std::log(total);
  std::vector<Real> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {ix}, [](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto y = t.values(self);
    Real gsum = 0;
    for (Real e : g) gsum += e;
    auto gx = t.grad(t.inputs(self)[0]);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] - std::exp(y[i]) * gsum;
  });
}

Tensor softmax(const Tensor& x) { return exp(log_softmax(x)); }

Tensor logsumexp_rows(const Tensor& x) {
  if (x.rank() != 2 || x.shape()[1] == 0) fail(ErrorKind::Dimension, "logsumexp_rows needs a matrix, got " + shape_str(x.shape()));
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  auto v = x.values();
  std::vector<Real> out(m);
  for (std::size_t r = 0; r < m; ++r) {
    Real mx = -std::numeric_limits<Real>::infinity();
    for (std::size_t c = 0; c < n; ++c) mx = std::max(mx, v[r * n + c]);
    if (!std::isfinite(mx)) fail(ErrorKind::Numeric, "logsumexp_rows: non-finite row maximum");
    Real total = 0;
    for (std::size_t c = 0; c < n; ++c) total += std::exp(v[r * n + c] - mx);
    out[r] = mx + std::log(total);
  }
  const std::size_t ix = x.id();
  return x.tape().record({m}, std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto y = t.values(self);
    auto xv = t.values(ix);
    auto gx = t.grad(ix);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c) gx[r * n + c] += g[r] * std::exp(xv[r * n + c] - y[r]);
  });
}

Tensor embedding_lookup(const Tensor& table, std::size_t index) {
  if (table.rank() != 2) fail(ErrorKind::Dimension, "embedding_lookup needs a matrix, got " + shape_str(table.shape()));
  const std::size_t vocab = table.shape()[0], d = table.shape()[1];
  if (index >= vocab) {
    fail(ErrorKind::Index, "embedding index " + std::to_string(index) + " out of range for table with " +
                               std::to_string(vocab) + " rows");
  }
  auto v = table.values().subspan(index * d, d);
  const std::size_t it = table.id();
  return table.tape().record({d}, std::vector<Real>(v.begin(), v.end()), {it}, [=](Tape& t, std::size_t self) {
    accumulate(t.grad(it).subspan(index * d, d), t.grad_view(self));
  });
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices) {
  if (table.rank() != 2) fail(ErrorKind::Dimension, "gather_rows needs a matrix, got " + shape_str(table.shape()));
  const std::size_t vocab = table.shape()[0], d = table.shape()[1];
  auto v = table.values();
  std::vector<Real> out;
  out.reserve(indices.size() * d);
  for (std::size_t idx : indices) {
    if (idx >= vocab) {
      fail(ErrorKind::Index, "embedding index " + std::to_string(idx) + " out of range for table with " +
                                 std::to_string(vocab) + " rows");
    }
    out.insert(out.end(), v.begin() + idx * d, v.begin() + (idx + 1) * d);
  }
  std::vector<std::size_t> rows(indices.begin(), indices.end());
  const std::size_t it = table.id();
  return table.tape().record({rows.size(), d}, std::move(out), {it}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto gt = t.grad(it);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < d; ++j) gt[rows[r] * d + j] += g[r * d + j];
  });
}

Tensor stack_rows(std::span<const Tensor> rows) {
  if (rows.empty()) fail(ErrorKind::Dimension, "stack_rows of zero tensors");
  const Shape& s0 = rows[0].shape();
  if (s0.size() != 1) fail(ErrorKind::Dimension, "stack_rows needs vectors, got " + shape_str(s0));
  const std::size_t n = s0[0];
  std::vector<Real> out;
  out.reserve(rows.size() * n);
  std::vector<std::size_t> ids;
  for (const Tensor& r : rows) {
    same_tape(rows[0], r);
    if (r.shape() != s0) shape_error("stack_rows", s0, r.shape());
    auto v = r.values();
    out.insert(out.end(), v.begin(), v.end());
    ids.push_back(r.id());
  }
  Tape& tape = rows[0].tape();
  const std::size_t k = rows.size();
  return tape.record({k, n}, std::move(out), ids, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    for (std::size_t r = 0; r < k; ++r) accumulate(t.grad(ids[r]), g.subspan(r * n, n));
  });
}

Tensor transpose(const Tensor& x) {
  if (x.rank() != 2) fail(ErrorKind::Dimension, "transpose needs a matrix, got " + shape_str(x.shape()));
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  auto v = x.values();
  std::vector<Real> out(m * n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out[c * m + r] = v[r * n + c];
  const std::size_t ix = x.id();
  return x.tape().record({n, m}, std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto gx = t.grad(ix);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c) gx[r * n + c] += g[c * m + r];
  });
}

Tensor mean_rows(const Tensor& x) {
  if (x.rank() != 2 || x.shape()[0] == 0) fail(ErrorKind::Dimension, "mean_rows needs a non-empty matrix, got " + shape_str(x.shape()));
  const std::size_t k = x.shape()[0], d = x.shape()[1];
  auto v = x.values();
  std::vector<Real> out(d, 0.0);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < d; ++j) out[j] += v[r * d + j];
  for (auto& e : out) e /= static_cast<Real>(k);
  const std::size_t ix = x.id();
  return x.tape().record({d}, std::move(out), {ix}, [=](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto gx = t.grad(ix);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t j = 0; j < d; ++j) gx[r * d + j] += g[j] / static_cast<Real>(k);
  });
}

Tensor sum(const Tensor& x) {
  Real total = 0;
  for (Real e : x.values()) total += e;
  const std::size_t ix = x.id();
  return x.tape().record({}, {total}, {ix}, [](Tape& t, std::size_t self) {
    const Real g = t.grad_view(self)[0];
    for (auto& e : t.grad(t.inputs(self)[0])) e += g;
  });
}

Tensor add_n(std::span<const Tensor> terms) {
  if (terms.empty()) fail(ErrorKind::Dimension, "add_n of zero tensors");
  const Shape& s0 = terms[0].shape();
  std::vector<Real> out(numel(s0), 0.0);
  std::vector<std::size_t> ids;
  for (const Tensor& term : terms) {
    same_tape(terms[0], term);
    if (term.shape() != s0) shape_error("add_n", s0, term.shape());
    auto v = term.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    ids.push_back(term.id());
  }
  return terms[0].tape().record(s0, std::move(out), ids, [ids](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    for (std::size_t id : ids) accumulate(t.grad(id), g);
  });
}

Tensor pick(const Tensor& x, std::size_t index) {
  if (index >= x.size()) {
    fail(ErrorKind::Index, "pick index " + std::to_string(index) + " out of range for " + shape_str(x.shape()));
  }
  const std::size_t ix = x.id();
  return x.tape().record({}, {x.values()[index]}, {ix}, [=](Tape& t, std::size_t self) {
    t.grad(ix)[index] += t.grad_view(self)[0];
  });
}

Tensor dropout(const Tensor& x, Real rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) fail(ErrorKind::Config, "dropout rate must be in [0, 1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return x;
  const Real keep_scale = 1.0 / (1.0 - rate);
  std::vector<Real> mask(x.size());
  for (auto& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
  auto v = x.values();
  std::vector<Real> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * mask[i];
  const std::size_t ix = x.id();
  return x.tape().record(x.shape(), std::move(out), {ix}, [mask = std::move(mask), ix](Tape& t, std::size_t self) {
    auto g = t.grad_view(self);
    auto gx = t.grad(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * mask[i];
  });
}

}  // namespace gradphon::ad
