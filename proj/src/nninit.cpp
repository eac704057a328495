#include "hetero/nninit.hpp"

#include <cmath>
#include <numbers>

namespace hetero {

DenseMatrix NonnegFactors::logits() const {
  DenseMatrix l = matmul_nt(b, b);
  if (c.cols() > 0) l = l - matmul_nt(c, c);
  return l;
}

ReluSplit relu_split_columns(const DenseMatrix& v) {
  const std::size_t n = v.rows();
  const std::size_t m = v.cols();
  ReluSplit out{DenseMatrix(n, 2 * m), DenseMatrix(n, m)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double e = v(i, j);
      out.positive(i, j) = e > 0.0 ? std::numbers::sqrt2 * e : 0.0;
      out.positive(i, m + j) = e < 0.0 ? -std::numbers::sqrt2 * e : 0.0;
      out.negative(i, j) = std::abs(e);
    }
  }
  return out;
}

NonnegFactors nonneg_from_eigen(const EigenDecomposition& eig) {
  const std::size_t n = eig.eigvecs.rows();
  std::size_t num_pos = 0;
  for (double lambda : eig.eigvals) num_pos += lambda > 0.0 ? 1 : 0;
  const std::size_t num_neg = eig.rank() - num_pos;

  // Scaled eigenvectors: B* B*^T - C* C*^T reproduces the decomposition.
  DenseMatrix b_star(n, num_pos), c_star(n, num_neg);
  std::size_t pb = 0, pc = 0;
  for (std::size_t r = 0; r < eig.rank(); ++r) {
    const double lambda = eig.eigvals[r];
    const double scale = std::sqrt(std::abs(lambda));
    DenseMatrix& target = lambda > 0.0 ? b_star : c_star;
    std::size_t& col = lambda > 0.0 ? pb : pc;
    for (std::size_t i = 0; i < n; ++i) target(i, col) = scale * eig.eigvecs(i, r);
    ++col;
  }

  ReluSplit split_b = relu_split_columns(b_star);
  ReluSplit split_c = relu_split_columns(c_star);
  return NonnegFactors{hconcat(split_b.positive, split_c.negative),
                       hconcat(split_c.positive, split_b.negative)};
}

NonnegFactors init_constrained(const LpcaFactors& f, double eigen_tol) {
  return nonneg_from_eigen(low_rank_sym_eigen(f.x, f.y, eigen_tol));
}

}  // namespace hetero
