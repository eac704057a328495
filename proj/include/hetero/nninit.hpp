#pragma once

#include <cstddef>

#include "hetero/dense_matrix.hpp"
#include "hetero/linalg.hpp"
#include "hetero/lpca.hpp"

namespace hetero {

// Nonnegative factors with logits B B^T - C C^T. Either side may have zero
// columns; both always have the same row count.
struct NonnegFactors {
  DenseMatrix b;
  DenseMatrix c;

  std::size_t num_nodes() const { return b.rows(); }
  std::size_t width() const { return b.cols() + c.cols(); }
  DenseMatrix logits() const;
};

struct ReluSplit {
  DenseMatrix positive;  // [sqrt2 * relu(V) | sqrt2 * relu(-V)], n x 2m
  DenseMatrix negative;  // |V|, n x m
};

// Per column: v v^T = 2 relu(v) relu(v)^T + 2 relu(-v) relu(-v)^T - |v| |v|^T.
ReluSplit relu_split_columns(const DenseMatrix& v);

// Nonnegative B, C with B B^T - C C^T = Q diag(lambda) Q^T, using 3 columns
// per eigenpair.
NonnegFactors nonneg_from_eigen(const EigenDecomposition& eig);

// Stage-2 initialization: symmetrize the LPCA logits, eigendecompose them in
// low-rank form, and split every eigenpair into nonnegative parts.
NonnegFactors init_constrained(const LpcaFactors& f, double eigen_tol = kDefaultEigenTol);

}  // namespace hetero
