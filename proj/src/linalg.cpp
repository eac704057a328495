#include "hetero/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hetero {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_term(double a, double m) {
  return std::max(m, 0.0) - m * a + std::log1p(std::exp(-std::abs(m)));
}

LossAndGrad bce_with_logits(const DenseMatrix& targets, const DenseMatrix& logits,
                            const DenseMatrix* weights) {
  if (targets.rows() != logits.rows() || targets.cols() != logits.cols()) {
    throw std::invalid_argument("bce_with_logits: targets and logits differ in shape");
  }
  if (weights && (weights->rows() != logits.rows() || weights->cols() != logits.cols())) {
    throw std::invalid_argument("bce_with_logits: weights differ in shape");
  }
  LossAndGrad out{0.0, DenseMatrix(logits.rows(), logits.cols())};
  auto a = targets.values();
  auto m = logits.values();
  auto g = out.grad.values();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (weights) {
      const double w = weights->values()[i];
      if (w == 0.0) continue;
      out.loss += w * bce_term(a[i], m[i]);
      g[i] = w * (sigmoid(m[i]) - a[i]);
    } else {
      out.loss += bce_term(a[i], m[i]);
      g[i] = sigmoid(m[i]) - a[i];
    }
  }
  return out;
}

ThinQr thin_qr(const DenseMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  if (n < m) throw std::invalid_argument("thin_qr: requires rows >= cols");

  DenseMatrix work = x;
  std::vector<std::vector<double>> reflectors(m);
  for (std::size_t j = 0; j < m; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += work(i, j) * work(i, j);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = work(j, j) > 0.0 ? -norm : norm;
    std::vector<double> v(n - j);
    for (std::size_t i = j; i < n; ++i) v[i - j] = work(i, j);
    v[0] -= alpha;
    double vnorm = 0.0;
    for (double e : v) vnorm += e * e;
    vnorm = std::sqrt(vnorm);
    if (vnorm == 0.0) continue;
    for (double& e : v) e /= vnorm;
    for (std::size_t c = j; c < m; ++c) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i - j] * work(i, c);
      for (std::size_t i = j; i < n; ++i) work(i, c) -= 2.0 * dot * v[i - j];
    }
    reflectors[j] = std::move(v);
  }

  ThinQr out{DenseMatrix(n, m), DenseMatrix(m, m), std::vector<bool>(m, false)};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) out.r(i, j) = work(i, j);

  // Q = H_0 H_1 ... H_{m-1} applied to the leading m columns of the identity.
  for (std::size_t j = 0; j < m; ++j) out.q(j, j) = 1.0;
  for (std::size_t jj = m; jj-- > 0;) {
    const auto& v = reflectors[jj];
    if (v.empty()) continue;
    for (std::size_t c = 0; c < m; ++c) {
      double dot = 0.0;
      for (std::size_t i = jj; i < n; ++i) dot += v[i - jj] * out.q(i, c);
      if (dot == 0.0) continue;
      for (std::size_t i = jj; i < n; ++i) out.q(i, c) -= 2.0 * dot * v[i - jj];
    }
  }

  const double scale = frobenius_norm(x);
  for (std::size_t j = 0; j < m; ++j) {
    if (out.r(j, j) < 0.0) {
      for (std::size_t c = j; c < m; ++c) out.r(j, c) = -out.r(j, c);
      for (std::size_t i = 0; i < n; ++i) out.q(i, j) = -out.q(i, j);
    }
    if (out.r(j, j) <= 1e-12 * scale) {
      out.r(j, j) = 0.0;
      out.deficient[j] = true;
    }
  }
  return out;
}

DenseMatrix EigenDecomposition::reconstruct() const {
  DenseMatrix scaled = eigvecs;
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= eigvals[j];
  return matmul_nt(scaled, eigvecs);
}

namespace {

// Sign convention: the largest-magnitude component of each column is positive
// (earliest index wins among near-ties).
void canonicalize_signs(DenseMatrix& vecs) {
  for (std::size_t c = 0; c < vecs.cols(); ++c) {
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < vecs.rows(); ++i)
      if (std::abs(vecs(i, c)) > std::abs(vecs(pivot, c)) + 1e-12) pivot = i;
    if (vecs.rows() > 0 && vecs(pivot, c) < 0.0)
      for (std::size_t i = 0; i < vecs.rows(); ++i) vecs(i, c) = -vecs(i, c);
  }
}

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Rotate rows/columns p and q of `a` to annihilate a(p, q); accumulate into `v`.
void jacobi_rotate(DenseMatrix& a, DenseMatrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < v.rows(); ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition sym_eigen(const DenseMatrix& s, double tol) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw std::invalid_argument("sym_eigen: matrix is not square");
  if (!(tol > 0.0)) throw std::invalid_argument("sym_eigen: tolerance must be positive");

  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));
  DenseMatrix v = DenseMatrix::identity(n);

  // Iterate well past the requested tolerance; Jacobi converges quadratically
  // so the extra sweeps are cheap and keep reconstruction error near roundoff.
  const double threshold = std::min(tol, 1e-14) * frobenius_norm(a);
  int sweep = 0;
  double off = off_diagonal_norm(a);
  while (off > threshold) {
    if (sweep == kJacobiSweepCap) throw EigenNonConvergence(off, sweep);
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
    ++sweep;
    const double next = off_diagonal_norm(a);
    if (next >= off && next <= 1e-12 * frobenius_norm(a)) break;  // stalled at roundoff
    off = next;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(a(x, x));
    const double ay = std::abs(a(y, y));
    if (ax != ay) return ax > ay;
    return a(x, x) > a(y, y);
  });

  const double largest = n == 0 ? 0.0 : std::abs(a(order[0], order[0]));
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const double lambda = a(idx, idx);
    if (largest > 0.0 && std::abs(lambda) > tol * largest) kept.push_back(idx);
  }

  EigenDecomposition out;
  out.eigvals.reserve(kept.size());
  out.eigvecs = DenseMatrix(n, kept.size());
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const std::size_t idx = kept[c];
    out.eigvals.push_back(a(idx, idx));
    for (std::size_t i = 0; i < n; ++i) out.eigvecs(i, c) = v(i, idx);
  }
  canonicalize_signs(out.eigvecs);
  return out;
}

DenseMatrix symmetrized_product(const DenseMatrix& x, const DenseMatrix& y) {
  DenseMatrix xy = matmul_nt(x, y);
  DenseMatrix l(xy.rows(), xy.cols());
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = 0; j < l.cols(); ++j) l(i, j) = 0.5 * (xy(i, j) + xy(j, i));
  return l;
}

EigenDecomposition low_rank_sym_eigen(const DenseMatrix& x, const DenseMatrix& y, double tol) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("low_rank_sym_eigen: X and Y differ in shape");
  }
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  if (n <= 2 * k) return sym_eigen(symmetrized_product(x, y), tol);

  ThinQr qr = thin_qr(hconcat(x, y));
  DenseMatrix rx(2 * k, k);
  DenseMatrix ry(2 * k, k);
  for (std::size_t i = 0; i < 2 * k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      rx(i, j) = qr.r(i, j);
      ry(i, j) = qr.r(i, j + k);
    }
  }
  EigenDecomposition core = sym_eigen(symmetrized_product(rx, ry), tol);

  EigenDecomposition out;
  out.eigvals = core.eigvals;
  out.eigvecs = matmul(qr.q, core.eigvecs);
  canonicalize_signs(out.eigvecs);
  return out;
}

}  // namespace hetero
