#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>

#include "causalmamba/tensor.hpp"

namespace causalmamba {

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode gradient tape. Values are recorded in evaluation order;
/// backward() walks the records in reverse exactly once.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, bool requires_grad = true);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  /// Record an op result. The output requires a gradient iff any input does;
  /// `backward` is dropped otherwise. Throws NonFinite on a non-finite value.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);

  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }

  /// Gradient accumulator for `v`, zero-initialised on first use; nullptr
  /// when `v` does not require a gradient.
  Tensor* grad_slot(Var v);

  void backward(Var scalar_output);

  /// Gradient of the last backward() output with respect to `v` (zeros if
  /// `v` did not contribute).
  Tensor grad(Var v) const;

  const Tensor& value(Var v) const { return nodes_[v.id()].value; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;
  bool backward_done_ = false;
};

inline const Tensor& Var::value() const { return tape_->value(*this); }

}  // namespace causalmamba
