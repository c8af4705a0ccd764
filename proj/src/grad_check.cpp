#include "causalmamba/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "causalmamba/error.hpp"

namespace causalmamba {

namespace {
constexpr double kKinkTolerance = 1e-2;
}

std::vector<Tensor> grad(const MultiScalarFn& f, std::span<const Tensor> leaves) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(leaves.size());
  for (const Tensor& leaf : leaves) vars.push_back(tape.leaf(leaf));
  Var out = f(tape, vars);
  tape.backward(out);
  std::vector<Tensor> grads;
  grads.reserve(vars.size());
  for (Var v : vars) grads.push_back(tape.grad(v));
  return grads;
}

Tensor grad(const ScalarFn& f, const Tensor& x) {
  return grad([&f](Tape& t, std::span<const Var> v) { return f(t, v[0]); }, std::span<const Tensor>(&x, 1))[0];
}

double evaluate(const ScalarFn& f, const Tensor& x) {
  try {
    Tape tape;
    Var out = f(tape, tape.constant(x));
    const double v = out.value().item();
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteEvaluation, "f is not finite");
    return v;
  } catch (const Error& e) {
    if (e.code() == Errc::NonFinite) throw Error(Errc::NonFiniteEvaluation, e.what());
    throw;
  }
}

GradCheckReport finite_diff_check(const ScalarFn& f, const Tensor& x, double step, double tol) {
  const double f0 = evaluate(f, x);
  Tensor analytic;
  try {
    analytic = grad(f, x);
  } catch (const Error& e) {
    if (e.code() == Errc::NonFinite) throw Error(Errc::NonFiniteEvaluation, e.what());
    throw;
  }
  GradCheckReport report;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double fp = evaluate(f, probe);
    probe[i] = x[i] - step;
    const double fm = evaluate(f, probe);
    probe[i] = x[i];

    const double forward = (fp - f0) / step;
    const double backward = (f0 - fm) / step;
    if (std::abs(forward - backward) > kKinkTolerance * std::max({1.0, std::abs(forward), std::abs(backward)})) {
      report.excluded.push_back(i);
      continue;
    }
    const double numeric = (fp - fm) / (2.0 * step);
    const double a = analytic[i];
    const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
    ++report.checked;
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_index = i;
    }
  }
  report.pass = report.max_rel_err <= tol;
  return report;
}

}  // namespace causalmamba
