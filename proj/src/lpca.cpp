#include "hetero/lpca.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hetero/linalg.hpp"

namespace hetero {

namespace {

void check_adjacency(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("adjacency matrix must be square");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0) throw std::invalid_argument("adjacency matrix must have zero diagonal");
    for (std::size_t j = 0; j < i; ++j) {
      if (a(i, j) != a(j, i)) throw std::invalid_argument("adjacency matrix must be symmetric");
      if (a(i, j) != 0.0 && a(i, j) != 1.0)
        throw std::invalid_argument("adjacency matrix must be 0/1");
    }
  }
}

}  // namespace

FactorObjective lpca_objective(const DenseMatrix& x, const DenseMatrix& y,
                               const DenseMatrix& adjacency, double reg_weight,
                               const DenseMatrix* weights) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("lpca_objective: X and Y differ in shape");
  }
  if (adjacency.rows() != x.rows() || adjacency.cols() != x.rows()) {
    throw std::invalid_argument("lpca_objective: adjacency does not match factor rows");
  }
  LossAndGrad bce = bce_with_logits(adjacency, matmul_nt(x, y), weights);
  FactorObjective out;
  out.loss = bce.loss + reg_weight * (squared_frobenius_norm(x) + squared_frobenius_norm(y));
  out.grad_first = matmul(bce.grad, y);
  out.grad_second = matmul_tn(bce.grad, x);
  if (reg_weight != 0.0) {
    auto gx = out.grad_first.values();
    auto gy = out.grad_second.values();
    auto xv = x.values();
    auto yv = y.values();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] += 2.0 * reg_weight * xv[i];
      gy[i] += 2.0 * reg_weight * yv[i];
    }
  }
  return out;
}

LpcaFit fit_lpca(const DenseMatrix& adjacency, std::size_t k, const FitConfig& cfg,
                 const DenseMatrix* weights) {
  check_adjacency(adjacency);
  if (k < 1) throw std::invalid_argument("fit_lpca: rank must be >= 1");
  const std::size_t n = adjacency.rows();
  const std::size_t half = n * k;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> init(0.0, 1.0 / std::sqrt(static_cast<double>(k)));
  std::vector<double> params(2 * half);
  for (double& v : params) v = init(rng);
  const double reg = cfg.reg_weight.resolve(params);

  DenseMatrix x(n, k), y(n, k);
  auto unpack = [&](std::span<const double> p) {
    std::copy(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(half), x.values().begin());
    std::copy(p.begin() + static_cast<std::ptrdiff_t>(half), p.end(), y.values().begin());
  };
  Objective objective = [&](std::span<const double> p, std::span<double> grad) {
    unpack(p);
    FactorObjective obj = lpca_objective(x, y, adjacency, reg, weights);
    std::copy(obj.grad_first.values().begin(), obj.grad_first.values().end(), grad.begin());
    std::copy(obj.grad_second.values().begin(), obj.grad_second.values().end(),
              grad.begin() + static_cast<std::ptrdiff_t>(half));
    return obj.loss;
  };

  OptimResult res = minimize(objective, std::move(params), {}, cfg);
  unpack(res.x);
  LpcaFit fit;
  fit.factors = LpcaFactors{x, y, reg};
  fit.trace = StageTrace{res.status, std::move(res.loss_history), res.iterations};
  return fit;
}

}  // namespace hetero
