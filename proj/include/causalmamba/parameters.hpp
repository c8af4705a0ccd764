#pragma once

#include <string>
#include <vector>

#include "causalmamba/random.hpp"
#include "causalmamba/tape.hpp"

namespace causalmamba {

// Parameter blocks are templates over their storage: Block<Tensor> owns the
// values, Block<Var> is the same block registered on a tape. Every block
// exposes `each(self, f)` which calls f(name, field) in a fixed order.

/// Registers every tensor of `params` as a gradient leaf, in `each` order,
/// appending the leaves to `registry` when given.
template <template <class> class Block>
Block<Var> bind_params(Tape& tape, const Block<Tensor>& params, std::vector<Var>* registry = nullptr) {
  Block<Var> vars;
  std::vector<Var*> slots;
  Block<Var>::each(vars, [&](const std::string&, Var& v) { slots.push_back(&v); });
  std::size_t i = 0;
  Block<Tensor>::each(params, [&](const std::string&, const Tensor& t) {
    *slots[i] = tape.leaf(t);
    if (registry) registry->push_back(*slots[i]);
    ++i;
  });
  return vars;
}

/// N(0, std²) entries.
Tensor random_normal(Shape shape, double stddev, Rng& rng);

}  // namespace causalmamba
