#pragma once

#include <cstddef>

#include "hetero/dense_matrix.hpp"
#include "hetero/optim.hpp"

namespace hetero {

// Unconstrained logit factors: sigma(X Y^T) approximates the adjacency matrix.
struct LpcaFactors {
  DenseMatrix x;
  DenseMatrix y;
  double reg_weight_used = 0.0;

  std::size_t rank() const { return x.cols(); }
  DenseMatrix logits() const { return matmul_nt(x, y); }
};

struct FactorObjective {
  double loss = 0.0;
  DenseMatrix grad_first;   // d/dX (or d/dB)
  DenseMatrix grad_second;  // d/dY (or d/dC)
};

// BCE(A, X Y^T) + reg * (|X|_F^2 + |Y|_F^2) and its gradients.
FactorObjective lpca_objective(const DenseMatrix& x, const DenseMatrix& y,
                               const DenseMatrix& adjacency, double reg_weight,
                               const DenseMatrix* weights = nullptr);

struct StageTrace {
  OptimStatus status = OptimStatus::max_iters;
  std::vector<double> loss_history;
  int iterations = 0;
};

struct LpcaFit {
  LpcaFactors factors;
  StageTrace trace;
};

// Random Gaussian init (std 1/sqrt(k), seeded by cfg.seed), then L-BFGS.
// `weights` masks entries out of the loss (link-prediction training).
LpcaFit fit_lpca(const DenseMatrix& adjacency, std::size_t k, const FitConfig& cfg,
                 const DenseMatrix* weights = nullptr);

}  // namespace hetero
