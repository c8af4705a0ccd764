#include "causalmamba/matrix_exp.hpp"

#include <cmath>

#include "causalmamba/error.hpp"

namespace causalmamba {

Tensor matrix_exp(const Tensor& m) {
  if (m.rank() != 2 || m.dim(0) != m.dim(1)) throw Error(Errc::NonSquare, "matrix_exp of " + shape_string(m.shape()));
  require_finite(m, "matrix_exp input");
  const std::size_t n = m.dim(0);
  const Tensor eye = Tensor::identity(n);

  const double norm = norm1(m);
  int squarings = 0;
  if (norm > kExpScalingTarget) squarings = static_cast<int>(std::ceil(std::log2(norm / kExpScalingTarget)));
  const Tensor a = std::ldexp(1.0, -squarings) * m;

  Tensor e = eye;
  for (int k = kExpTaylorOrder; k >= 1; --k) e = eye + (1.0 / k) * matmul(a, e);
  for (int i = 0; i < squarings; ++i) e = matmul(e, e);

  require_finite(e, "matrix_exp result");
  return e;
}

}  // namespace causalmamba
