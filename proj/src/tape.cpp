#include "causalmamba/tape.hpp"

#include "causalmamba/error.hpp"

namespace causalmamba {

Var Tape::leaf(Tensor value, bool requires_grad) {
  require_finite(value, "tape leaf");
  nodes_.push_back(Node{std::move(value), {}, requires_grad, false, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  if (!value.all_finite()) throw Error(Errc::NonFinite, "op produced non-finite values " + shape_string(value.shape()));
  bool needs = false;
  for (const Var& in : inputs) {
    if (in.tape() != this) throw Error(Errc::UnsupportedPrimitive, "input recorded on a different tape");
    needs = needs || nodes_[in.id()].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, needs, false, needs ? std::move(backward) : BackwardFn{}});
  return Var(this, nodes_.size() - 1);
}

Tensor* Tape::grad_slot(Var v) {
  Node& node = nodes_[v.id()];
  if (!node.requires_grad) return nullptr;
  if (!node.has_grad) {
    node.grad = Tensor(node.value.shape());
    node.has_grad = true;
  }
  return &node.grad;
}

void Tape::backward(Var out) {
  if (backward_done_) throw Error(Errc::RepeatedBackward, "backward already ran on this tape; record a new one");
  if (out.tape() != this) throw Error(Errc::UnsupportedPrimitive, "output belongs to a different tape");
  if (nodes_[out.id()].value.size() != 1)
    throw Error(Errc::ShapeMismatch, "backward needs a scalar output, got " + shape_string(out.shape()));
  backward_done_ = true;
  if (!nodes_[out.id()].requires_grad) return;
  Tensor* seed = grad_slot(out);
  seed->fill(1.0);
  for (std::size_t i = out.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.has_grad || !node.backward) continue;
    node.backward(*this, node.grad);
  }
}

Tensor Tape::grad(Var v) const {
  const Node& node = nodes_[v.id()];
  if (node.has_grad) return node.grad;
  return Tensor(node.value.shape());
}

}  // namespace causalmamba
