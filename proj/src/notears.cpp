#include "causalmamba/notears.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "causalmamba/digraph.hpp"
#include "causalmamba/error.hpp"
#include "causalmamba/matrix_exp.hpp"

namespace causalmamba {

namespace {

// Augmented-Lagrangian subproblem over v = [W⁺, W⁻] (2n² entries).
class Subproblem {
 public:
  Subproblem(const Tensor& gram, std::size_t m, double lambda1)
      : gram_(gram), n_(gram.dim(0)), inv_m_(1.0 / static_cast<double>(m)), lambda1_(lambda1) {}

  void set_multipliers(double rho, double alpha) {
    rho_ = rho;
    alpha_ = alpha;
  }

  Tensor to_w(const std::vector<double>& v) const {
    Tensor w({n_, n_});
    for (std::size_t i = 0; i < n_ * n_; ++i) w[i] = v[i] - v[n_ * n_ + i];
    return w;
  }

  double acyclicity(const Tensor& w, Tensor* grad) const {
    const Tensor e = matrix_exp(hadamard(w, w));
    if (grad) {
      *grad = Tensor({n_, n_});
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) (*grad)(i, j) = e(j, i) * 2.0 * w(i, j);
    }
    return trace(e) - static_cast<double>(n_);
  }

  double value_and_grad(const std::vector<double>& v, std::vector<double>& g) const {
    const Tensor w = to_w(v);
    // (1/2m)‖X − XW‖² = (1/2m) tr(G − 2WᵀG + WᵀGW) with G = XᵀX.
    const Tensor gw = matmul(gram_, w);
    double loss = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      loss += gram_(i, i);
      for (std::size_t j = 0; j < n_; ++j) loss += -2.0 * w(i, j) * gram_(i, j) + w(i, j) * gw(i, j);
    }
    loss *= 0.5 * inv_m_;
    Tensor h_grad;
    double h;
    try {
      h = acyclicity(w, &h_grad);
    } catch (const Error& e) {
      // e^{W⊙W} overflows far outside the feasible region; reject the trial point.
      if (e.code() != Errc::NonFinite) throw;
      return std::numeric_limits<double>::infinity();
    }
    double l1 = 0.0;
    for (double x : v) l1 += x;
    const double obj = loss + 0.5 * rho_ * h * h + alpha_ * h + lambda1_ * l1;

    const double hw = rho_ * h + alpha_;
    g.resize(v.size());
    for (std::size_t i = 0; i < n_ * n_; ++i) {
      const double gsmooth = inv_m_ * (gw[i] - gram_[i]) + hw * h_grad[i];
      g[i] = gsmooth + lambda1_;
      g[n_ * n_ + i] = -gsmooth + lambda1_;
    }
    return obj;
  }

  // Bounds: v ≥ 0, diagonal entries fixed at 0.
  void project(std::vector<double>& v) const {
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::size_t idx = k % (n_ * n_);
      if (idx / n_ == idx % n_ || v[k] < 0.0) v[k] = 0.0;
    }
  }

 private:
  const Tensor& gram_;
  std::size_t n_;
  double inv_m_;
  double lambda1_;
  double rho_ = 1.0;
  double alpha_ = 0.0;
};

double projected_gradient_norm(const Subproblem& p, const std::vector<double>& v, const std::vector<double>& g) {
  std::vector<double> step(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) step[i] = v[i] - g[i];
  p.project(step);
  double norm = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) norm = std::max(norm, std::abs(step[i] - v[i]));
  return norm;
}

// Nonmonotone spectral projected gradient (Birgin, Martínez & Raydan).
void solve_spg(const Subproblem& p, std::vector<double>& v, std::size_t max_iter, double tol) {
  constexpr std::size_t kMemory = 10;
  constexpr double kGamma = 1e-4;
  constexpr double kStepMin = 1e-12, kStepMax = 1e12;

  p.project(v);
  std::vector<double> g, g_new, v_new(v.size()), d(v.size());
  double f = p.value_and_grad(v, g);
  std::deque<double> history{f};
  double pg = projected_gradient_norm(p, v, g);
  double step = pg > 0.0 ? std::clamp(1.0 / pg, kStepMin, kStepMax) : 1.0;

  for (std::size_t it = 0; it < max_iter && pg > tol; ++it) {
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i] - step * g[i];
    p.project(d);
    double gd = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      d[i] -= v[i];
      gd += g[i] * d[i];
    }
    const double f_ref = *std::max_element(history.begin(), history.end());
    double t = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60 && !accepted; ++ls) {
      for (std::size_t i = 0; i < v.size(); ++i) v_new[i] = v[i] + t * d[i];
      f_new = p.value_and_grad(v_new, g_new);
      accepted = f_new <= f_ref + kGamma * t * gd;
      if (accepted) break;
      // Safeguarded quadratic backtracking.
      const double t_quad = -0.5 * gd * t * t / (f_new - f - t * gd);
      t = (t_quad >= 0.1 * t && t_quad <= 0.9 * t) ? t_quad : 0.5 * t;
    }
    if (!accepted) break;
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double s = v_new[i] - v[i];
      ss += s * s;
      sy += s * (g_new[i] - g[i]);
    }
    step = sy > 0.0 ? std::clamp(ss / sy, kStepMin, kStepMax) : kStepMax;
    v.swap(v_new);
    g.swap(g_new);
    f = f_new;
    history.push_back(f);
    if (history.size() > kMemory) history.pop_front();
    pg = projected_gradient_norm(p, v, g);
  }
}

}  // namespace

NotearsResult notears_fit(const Tensor& x, const NotearsOptions& options) {
  if (x.rank() != 2 || x.dim(0) < 2 || x.dim(1) < 2)
    throw Error(Errc::ShapeMismatch, "notears_fit needs m ≥ 2 samples of n ≥ 2 variables, got " + shape_string(x.shape()));
  require_finite(x, "notears_fit data");
  const std::size_t m = x.dim(0), n = x.dim(1);

  Tensor centred = x;
  for (std::size_t j = 0; j < n; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < m; ++i) mu += x(i, j);
    mu /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) centred(i, j) -= mu;
  }
  const Tensor gram = matmul(transpose(centred), centred);

  Subproblem problem(gram, m, options.lambda1);
  std::vector<double> v(2 * n * n, 0.0);
  double rho = 1.0, alpha = 0.0, h = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool done = false;
  for (; iterations < options.max_iter && !done; ++iterations) {
    std::vector<double> candidate;
    double h_new = h;
    while (rho < options.rho_max) {
      candidate = v;
      problem.set_multipliers(rho, alpha);
      solve_spg(problem, candidate, options.inner_max_iter, options.inner_tol);
      h_new = problem.acyclicity(problem.to_w(candidate), nullptr);
      if (h_new > 0.25 * h)
        rho *= 10.0;
      else
        break;
    }
    if (!candidate.empty()) v = std::move(candidate);
    h = h_new;
    alpha += rho * h;
    done = h <= options.h_tol || rho >= options.rho_max;
  }
  if (!done)
    throw Error(Errc::NonConvergence, "h = " + std::to_string(h) + " after " + std::to_string(iterations) +
                                          " outer iterations");

  NotearsResult result;
  result.h = h;
  result.iterations = iterations;
  result.graph.weights = problem.to_w(v);
  result.graph.threshold = options.threshold;
  result.graph.edges = extract_digraph(result.graph.weights, options.threshold);
  for (std::size_t j = 0; j < n; ++j) result.graph.node_ids.push_back(std::to_string(j));
  while (auto cycle = find_cycle(result.graph.edges, n)) {
    const auto weakest = std::min_element(cycle->begin(), cycle->end(), [&](const Edge& a, const Edge& b) {
      return std::abs(result.graph.weights(a.parent, a.child)) < std::abs(result.graph.weights(b.parent, b.child));
    });
    std::erase(result.graph.edges, *weakest);
    ++result.pruned_edges;
  }
  return result;
}

}  // namespace causalmamba
