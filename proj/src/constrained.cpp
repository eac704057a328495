#include "hetero/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hetero/linalg.hpp"

namespace hetero {

double CommunityModel::logit(NodeId i, NodeId j) const {
  if (i >= num_nodes() || j >= num_nodes()) {
    throw std::out_of_range("node id out of range: (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") with n = " + std::to_string(num_nodes()));
  }
  double s = 0.0;
  for (std::size_t c = 0; c < k(); ++c) s += v(i, c) * v(j, c) * w[c];
  return s;
}

DenseMatrix CommunityModel::logits() const {
  DenseMatrix scaled = v;
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t c = 0; c < k(); ++c) scaled(i, c) *= w[c];
  return matmul_nt(scaled, v);
}

DenseMatrix CommunityModel::probabilities() const {
  DenseMatrix p = logits();
  for (double& e : p.values()) e = sigmoid(e);
  return p;
}

namespace {

std::vector<double> column_norms(const DenseMatrix& m) {
  std::vector<double> norms(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) norms[j] += m(i, j) * m(i, j);
  for (double& v : norms) v = std::sqrt(v);
  return norms;
}

DenseMatrix select_columns(const DenseMatrix& m, const std::vector<std::size_t>& cols) {
  DenseMatrix out(m.rows(), cols.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(i, cols[j]);
  return out;
}

void require_rows(const NonnegFactors& f) {
  if (f.c.cols() > 0 && f.c.rows() != f.b.rows()) {
    throw std::invalid_argument("nonnegative factors: B and C differ in row count");
  }
}

}  // namespace

NonnegFactors prune_columns(const NonnegFactors& f, std::size_t k) {
  if (k == 0) throw std::invalid_argument("prune_columns: k must be positive");
  require_rows(f);
  if (k > f.width()) {
    throw std::invalid_argument("prune_columns: k = " + std::to_string(k) + " exceeds " +
                                std::to_string(f.width()) + " available columns");
  }
  struct Candidate {
    double norm;
    int side;  // 0 = B, 1 = C
    std::size_t index;
  };
  std::vector<Candidate> pool;
  auto nb = column_norms(f.b);
  auto nc = column_norms(f.c);
  for (std::size_t j = 0; j < nb.size(); ++j) pool.push_back({nb[j], 0, j});
  for (std::size_t j = 0; j < nc.size(); ++j) pool.push_back({nc[j], 1, j});
  std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.norm != b.norm) return a.norm > b.norm;
    if (a.side != b.side) return a.side < b.side;
    return a.index < b.index;
  });
  std::vector<std::size_t> keep_b, keep_c;
  for (std::size_t r = 0; r < k; ++r) (pool[r].side == 0 ? keep_b : keep_c).push_back(pool[r].index);
  std::sort(keep_b.begin(), keep_b.end());
  std::sort(keep_c.begin(), keep_c.end());
  NonnegFactors out{select_columns(f.b, keep_b), select_columns(f.c, keep_c)};
  if (out.c.rows() != out.b.rows()) out.c = DenseMatrix(out.b.rows(), out.c.cols());
  return out;
}

FactorObjective constrained_objective(const DenseMatrix& b, const DenseMatrix& c,
                                      const DenseMatrix& adjacency, double reg_weight,
                                      const DenseMatrix* weights) {
  const std::size_t n = b.rows();
  if (c.rows() != n) throw std::invalid_argument("constrained_objective: B and C row mismatch");
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw std::invalid_argument("constrained_objective: adjacency does not match factor rows");
  }
  DenseMatrix logits = matmul_nt(b, b);
  if (c.cols() > 0) logits = logits - matmul_nt(c, c);
  LossAndGrad bce = bce_with_logits(adjacency, logits, weights);

  // d/dB of BCE(B B^T) is (G + G^T) B; G is symmetric whenever A and the
  // weights are, giving 2 G B.
  DenseMatrix g_sym(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g_sym(i, j) = bce.grad(i, j) + bce.grad(j, i);

  FactorObjective out;
  out.loss = bce.loss + reg_weight * (squared_frobenius_norm(b) + squared_frobenius_norm(c));
  out.grad_first = matmul(g_sym, b);
  out.grad_second = -1.0 * matmul(g_sym, c);
  if (reg_weight != 0.0) {
    auto gb = out.grad_first.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += 2.0 * reg_weight * bv[i];
    auto gc = out.grad_second.values();
    auto cv = c.values();
    for (std::size_t i = 0; i < gc.size(); ++i) gc[i] += 2.0 * reg_weight * cv[i];
  }
  return out;
}

ConstrainedFit fit_constrained(const DenseMatrix& adjacency, const NonnegFactors& f0,
                               const FitConfig& cfg, const DenseMatrix* weights) {
  require_rows(f0);
  const std::size_t n = f0.b.rows();
  const std::size_t size_b = f0.b.size();
  DenseMatrix b = f0.b;
  DenseMatrix c = f0.c.cols() > 0 ? f0.c : DenseMatrix(n, 0);

  std::vector<double> params;
  params.reserve(size_b + c.size());
  params.insert(params.end(), b.values().begin(), b.values().end());
  params.insert(params.end(), c.values().begin(), c.values().end());
  for (double p : params)
    if (!(p >= 0.0)) throw std::invalid_argument("fit_constrained: initial factors must be >= 0");
  const double reg = cfg.reg_weight.resolve(params);

  auto unpack = [&](std::span<const double> p) {
    std::copy(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(size_b), b.values().begin());
    std::copy(p.begin() + static_cast<std::ptrdiff_t>(size_b), p.end(), c.values().begin());
  };
  Objective objective = [&](std::span<const double> p, std::span<double> grad) {
    unpack(p);
    FactorObjective obj = constrained_objective(b, c, adjacency, reg, weights);
    std::copy(obj.grad_first.values().begin(), obj.grad_first.values().end(), grad.begin());
    std::copy(obj.grad_second.values().begin(), obj.grad_second.values().end(),
              grad.begin() + static_cast<std::ptrdiff_t>(size_b));
    return obj.loss;
  };

  const std::vector<double> lower(params.size(), 0.0);
  OptimResult res = minimize(objective, std::move(params), lower, cfg);
  unpack(res.x);
  ConstrainedFit fit;
  fit.factors = NonnegFactors{b, c};
  fit.reg_weight_used = reg;
  fit.trace = StageTrace{res.status, std::move(res.loss_history), res.iterations};
  return fit;
}

CommunityModel to_vw(const NonnegFactors& f) {
  require_rows(f);
  const std::size_t n = f.b.rows();
  std::vector<std::vector<double>> columns;
  CommunityModel m;
  auto absorb = [&](const DenseMatrix& side, double sign) {
    for (std::size_t j = 0; j < side.cols(); ++j) {
      std::vector<double> col = side.column(j);
      const double peak = col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
      if (!(peak > 0.0)) continue;
      for (double& e : col) e /= peak;
      columns.push_back(std::move(col));
      m.w.push_back(sign * peak * peak);
    }
  };
  absorb(f.b, 1.0);
  absorb(f.c, -1.0);
  m.v = DenseMatrix(n, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) m.v.set_column(j, columns[j]);
  return m;
}

double predict_prob(const CommunityModel& m, NodeId i, NodeId j) {
  return sigmoid(m.logit(i, j));
}

std::vector<double> logit_contributions(const CommunityModel& m, NodeId i, NodeId j) {
  if (i >= m.num_nodes() || j >= m.num_nodes()) {
    throw std::out_of_range("logit_contributions: node id out of range");
  }
  std::vector<double> out(m.k());
  for (std::size_t c = 0; c < m.k(); ++c) out[c] = m.v(i, c) * m.v(j, c) * m.w[c];
  return out;
}

CommunityModel build_threshold_witness(const DenseMatrix& b, const DenseMatrix& c, int t) {
  const std::size_t n = b.rows();
  if (c.cols() > 0 && c.rows() != n) {
    throw std::invalid_argument("build_threshold_witness: B and C differ in row count");
  }
  for (const DenseMatrix* m : {&b, &c})
    for (double e : m->values())
      if (e != 0.0 && e != 1.0) throw std::invalid_argument("build_threshold_witness: non-binary input");

  CommunityModel base = to_vw(NonnegFactors{b, c.cols() > 0 ? c : DenseMatrix(n, 0)});
  CommunityModel out;
  out.v = hconcat(base.v, DenseMatrix(n, 1, 1.0));
  out.w = base.w;
  out.w.push_back(0.5 - static_cast<double>(t));
  return out;
}

CommunityModel scale_weights(const CommunityModel& m, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("scale_weights: scale must be positive");
  CommunityModel out = m;
  for (double& w : out.w) w *= s;
  return out;
}

}  // namespace hetero
