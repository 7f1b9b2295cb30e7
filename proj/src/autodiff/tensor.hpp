#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gradphon::ad {

using Real = double;
using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// A named learnable array that lives outside any tape. Tapes reference its
/// storage directly; backward accumulates into `grad`.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Shape shape);

  std::string name;
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;

  void zero_grad();
};

class Tape;

/// Handle to one node of a Tape. Cheap to copy; valid while the tape is not
/// cleared.
class Tensor {
 public:
  Tensor() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  std::span<const Real> values() const;
  /// Empty when no gradient has reached this node.
  std::span<const Real> grad() const;
  Real item() const;

 private:
  friend class Tape;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Recording of a computation for reverse-mode differentiation. Nodes are
/// appended in evaluation order, so every input id is smaller than the id of
/// the node that consumes it and a reverse sweep is a valid topological order.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor constant(Shape shape, std::vector<Real> values);
  Tensor scalar(Real value) { return constant({}, {value}); }
  Tensor parameter(Parameter& param);
  /// Reads a parameter without routing gradient back into it.
  Tensor frozen(const Parameter& param);

  /// Appends an operation result. `backward` reads grad(self) and accumulates
  /// into the gradients of `inputs`.
  Tensor record(Shape shape, std::vector<Real> values, std::vector<std::size_t> inputs,
                BackwardFn backward);

  /// Populates gradients of everything `loss` depends on, seeding d loss = seed.
  void backward(const Tensor& loss, Real seed = 1.0);

  /// Drops every node together with its gradient slot.
  void clear();

  std::size_t size() const { return nodes_.size(); }
  const Shape& shape(std::size_t id) const { return nodes_[id].shape; }
  std::span<const Real> values(std::size_t id) const;
  std::span<const std::size_t> inputs(std::size_t id) const { return nodes_[id].inputs; }
  bool has_grad(std::size_t id) const;
  std::span<const Real> grad_view(std::size_t id) const;
  /// Gradient slot of a node, zero-allocated on first access.
  std::span<Real> grad(std::size_t id);

 private:
  struct Node {
    Shape shape;
    std::vector<Real> value;
    std::vector<Real> grad;
    Parameter* param = nullptr;
    const Parameter* frozen = nullptr;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
};

}  // namespace gradphon::ad
