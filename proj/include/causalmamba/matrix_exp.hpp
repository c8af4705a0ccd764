#pragma once

#include "causalmamba/tensor.hpp"

namespace causalmamba {

inline constexpr int kExpTaylorOrder = 18;
inline constexpr double kExpScalingTarget = 0.5;

/// e^M by scaling and squaring: M is scaled by 2^-s until its 1-norm is at
/// most 0.5, exponentiated with an order-18 Taylor polynomial (Horner form)
/// and squared s times.
/// Throws NonSquare / NonFinite.
Tensor matrix_exp(const Tensor& m);

}  // namespace causalmamba
