#pragma once

#include <cstdint>
#include <vector>

#include "hetero/dense_matrix.hpp"
#include "hetero/graph.hpp"

namespace hetero {

// Recruiting-site graph: nodes have a location and a role (recruiter or not).
// Same-location pairs of opposite role link often, same-location pairs of the
// same role rarely, and cross-location pairs almost never.
struct RecruiterParams {
  std::size_t n = 1000;
  std::size_t n_locations = 10;
  double p_hetero_same_loc = 0.8;
  double p_homo_same_loc = 0.05;
  double p_diff_loc = 0.01;
  double recruiter_frac = 0.5;
  std::uint64_t seed = 0;
};

struct RecruiterGraph {
  Graph graph;
  // Pairwise link probabilities. The diagonal carries the same-location
  // same-role value, so the matrix has rank <= 2 * n_locations.
  DenseMatrix expected;
  std::vector<std::size_t> location;
  std::vector<bool> recruiter;
};

RecruiterGraph generate_recruiter_graph(const RecruiterParams& params);

// One ground-truth group per (location, role) pair that has members:
// up to 2 * n_locations groups.
CommunityLabels recruiter_groups(const RecruiterGraph& rg, std::size_t n_locations);

// Edge (i, j) iff b_i . b_j - c_i . c_j >= t. B and C must be 0/1; a C with
// zero columns is accepted for any row count.
Graph generate_threshold_graph(const DenseMatrix& b, const DenseMatrix& c, int t);

}  // namespace hetero
