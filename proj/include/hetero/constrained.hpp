#pragma once

#include <cstddef>
#include <vector>

#include "hetero/dense_matrix.hpp"
#include "hetero/graph.hpp"
#include "hetero/lpca.hpp"
#include "hetero/nninit.hpp"
#include "hetero/optim.hpp"

namespace hetero {

// Interpretable edge-independent model: P(edge i~j) = sigma(v_i diag(w) v_j^T).
// Columns of V are community memberships in [0, 1]; w_c > 0 marks a
// homophilous community and w_c < 0 a heterophilous one.
struct CommunityModel {
  DenseMatrix v;
  std::vector<double> w;

  std::size_t num_nodes() const { return v.rows(); }
  std::size_t k() const { return w.size(); }

  double logit(NodeId i, NodeId j) const;
  DenseMatrix logits() const;
  DenseMatrix probabilities() const;
};

// Keep the k columns with the largest Euclidean norms, pooled across B and C.
// Ties go to B, then to the lower column index. Kept columns stay on their
// side in their original order.
NonnegFactors prune_columns(const NonnegFactors& f, std::size_t k);

// BCE(A, B B^T - C C^T) + reg * (|B|_F^2 + |C|_F^2) and its gradients.
FactorObjective constrained_objective(const DenseMatrix& b, const DenseMatrix& c,
                                      const DenseMatrix& adjacency, double reg_weight,
                                      const DenseMatrix* weights = nullptr);

struct ConstrainedFit {
  NonnegFactors factors;
  double reg_weight_used = 0.0;
  StageTrace trace;
};

// L-BFGS under B, C >= 0 starting from f0. An auto regularization weight is
// measured from f0.
ConstrainedFit fit_constrained(const DenseMatrix& adjacency, const NonnegFactors& f0,
                               const FitConfig& cfg, const DenseMatrix* weights = nullptr);

// Column-max normalization: V = [B / m_B, C / m_C], w = [+m_B^2, -m_C^2].
// All-zero columns are dropped.
CommunityModel to_vw(const NonnegFactors& f);

double predict_prob(const CommunityModel& m, NodeId i, NodeId j);

// Per-community logit terms V_ic V_jc w_c; they sum to the pair's logit and
// exp(term) is the community's multiplier on the edge odds.
std::vector<double> logit_contributions(const CommunityModel& m, NodeId i, NodeId j);

// Model whose logits are b_i.b_j - c_i.c_j + 1/2 - t, sign-consistent with
// generate_threshold_graph(B, C, t) and at least 1/2 away from zero.
CommunityModel build_threshold_witness(const DenseMatrix& b, const DenseMatrix& c, int t);

// w <- s * w. Logit signs, and so rounded predictions, are unchanged.
CommunityModel scale_weights(const CommunityModel& m, double s);

}  // namespace hetero
