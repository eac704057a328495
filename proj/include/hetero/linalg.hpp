#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetero/dense_matrix.hpp"

namespace hetero {

// Logistic function, evaluated on the branch that cannot overflow.
double sigmoid(double x);

// Per-entry binary cross-entropy of target a against logit m, in the form
// max(m,0) - m*a + log(1 + exp(-|m|)).
double bce_term(double a, double m);

struct LossAndGrad {
  double loss = 0.0;
  DenseMatrix grad;  // d loss / d logits
};

// Summed binary cross-entropy over all entries (diagonal included).
// `weights`, when given, scales each entry's loss and gradient; the masked
// link-prediction fits pass 0/1 weights so that held-out entries never
// influence the objective.
LossAndGrad bce_with_logits(const DenseMatrix& targets, const DenseMatrix& logits,
                            const DenseMatrix* weights = nullptr);

struct ThinQr {
  DenseMatrix q;  // n x m, orthonormal columns
  DenseMatrix r;  // m x m, upper triangular, nonnegative diagonal
  std::vector<bool> deficient;  // columns whose diagonal of R fell below tolerance
};

// Householder thin QR of an n x m matrix with n >= m.
ThinQr thin_qr(const DenseMatrix& x);

struct EigenDecomposition {
  std::vector<double> eigvals;  // sorted by descending |value|, positive first on ties
  DenseMatrix eigvecs;          // n x r, orthonormal columns

  std::size_t rank() const { return eigvals.size(); }
  // Q diag(lambda) Q^T
  DenseMatrix reconstruct() const;
};

class EigenNonConvergence : public std::runtime_error {
 public:
  EigenNonConvergence(double residual, int sweeps)
      : std::runtime_error("sym_eigen: Jacobi did not converge after " + std::to_string(sweeps) +
                           " sweeps (off-diagonal norm " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline constexpr double kDefaultEigenTol = 1e-9;
inline constexpr int kJacobiSweepCap = 50;

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenpairs with
// |lambda| <= tol * max|lambda| are dropped.
EigenDecomposition sym_eigen(const DenseMatrix& s, double tol = kDefaultEigenTol);

// Eigendecomposition of 0.5 * (X Y^T + Y X^T) without forming the n x n
// product when n > 2k: QR of [X Y] followed by Jacobi on the 2k x 2k core.
EigenDecomposition low_rank_sym_eigen(const DenseMatrix& x, const DenseMatrix& y,
                                      double tol = kDefaultEigenTol);

// 0.5 * (X Y^T + Y X^T), formed densely.
DenseMatrix symmetrized_product(const DenseMatrix& x, const DenseMatrix& y);

}  // namespace hetero
