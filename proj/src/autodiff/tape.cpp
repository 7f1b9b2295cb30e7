#include "autodiff/tensor.hpp"

#include <sstream>

#include "error.hpp"

namespace gradphon::ad {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Parameter::Parameter(std::string name_, Shape shape_)
    : name(std::move(name_)), shape(std::move(shape_)), value(numel(shape), 0.0), grad(value.size(), 0.0) {}

void Parameter::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

const Shape& Tensor::shape() const { return tape_->shape(id_); }
std::size_t Tensor::size() const { return numel(shape()); }
std::span<const Real> Tensor::values() const { return tape_->values(id_); }
std::span<const Real> Tensor::grad() const { return tape_->grad_view(id_); }

Real Tensor::item() const {
  if (size() != 1) fail(ErrorKind::Dimension, "item() on non-scalar tensor " + shape_str(shape()));
  return values()[0];
}

Tensor Tape::constant(Shape shape, std::vector<Real> values) {
  if (numel(shape) != values.size()) {
    fail(ErrorKind::Dimension, "constant of shape " + shape_str(shape) + " given " +
                                   std::to_string(values.size()) + " values");
  }
  return record(std::move(shape), std::move(values), {}, nullptr);
}

Tensor Tape::parameter(Parameter& param) {
  Node node;
  node.shape = param.shape;
  node.param = &param;
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::frozen(const Parameter& param) {
  Node node;
  node.shape = param.shape;
  node.frozen = &param;
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::record(Shape shape, std::vector<Real> values, std::vector<std::size_t> inputs,
                    BackwardFn backward) {
  Node node;
  node.shape = std::move(shape);
  node.value = std::move(values);
  node.inputs = std::move(inputs);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

std::span<const Real> Tape::values(std::size_t id) const {
  const Node& n = nodes_[id];
  if (n.param) return n.param->value;
  if (n.frozen) return n.frozen->value;
  return n.value;
}

bool Tape::has_grad(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.param ? true : !n.grad.empty();
}

std::span<const Real> Tape::grad_view(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.param ? std::span<const Real>(n.param->grad) : std::span<const Real>(n.grad);
}

std::span<Real> Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.param) return n.param->grad;
  if (n.grad.empty()) n.grad.assign(numel(n.shape), 0.0);
  return n.grad;
}

void Tape::backward(const Tensor& loss, Real seed) {
  if (loss.valid() && &loss.tape() != this) fail(ErrorKind::Dimension, "loss belongs to another tape");
  if (numel(nodes_[loss.id()].shape) != 1) {
    fail(ErrorKind::Dimension, "backward needs a scalar loss, got shape " + shape_str(nodes_[loss.id()].shape));
  }
  grad(loss.id())[0] += seed;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.param || n.grad.empty() || !n.backward) continue;
    n.backward(*this, i);
  }
}

void Tape::clear() { nodes_.clear(); }

}  // namespace gradphon::ad
