#include "hetero/generators.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace hetero {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string("recruiter graph: ") + name + " = " +
                                std::to_string(p) + " is not a probability");
  }
}

void require_binary(const DenseMatrix& m, const char* name) {
  for (double v : m.values())
    if (v != 0.0 && v != 1.0)
      throw std::invalid_argument(std::string("threshold graph: ") + name + " is not binary");
}

}  // namespace

RecruiterGraph generate_recruiter_graph(const RecruiterParams& p) {
  if (p.n < 2) throw std::invalid_argument("recruiter graph: need at least 2 nodes");
  if (p.n_locations < 1) throw std::invalid_argument("recruiter graph: need at least 1 location");
  require_probability(p.p_hetero_same_loc, "p_hetero_same_loc");
  require_probability(p.p_homo_same_loc, "p_homo_same_loc");
  require_probability(p.p_diff_loc, "p_diff_loc");
  require_probability(p.recruiter_frac, "recruiter_frac");

  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<std::size_t> pick_location(0, p.n_locations - 1);
  std::bernoulli_distribution pick_recruiter(p.recruiter_frac);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RecruiterGraph out;
  out.location.resize(p.n);
  out.recruiter.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    out.location[i] = pick_location(rng);
    out.recruiter[i] = pick_recruiter(rng);
  }

  out.expected = DenseMatrix(p.n, p.n);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = i; j < p.n; ++j) {
      double prob = p.p_diff_loc;
      if (out.location[i] == out.location[j]) {
        prob = out.recruiter[i] != out.recruiter[j] ? p.p_hetero_same_loc : p.p_homo_same_loc;
      }
      out.expected(i, j) = prob;
      out.expected(j, i) = prob;
      if (i != j && unit(rng) < prob) edges.emplace_back(i, j);
    }
  }
  out.graph = Graph(p.n, std::move(edges));
  return out;
}

CommunityLabels recruiter_groups(const RecruiterGraph& rg, std::size_t n_locations) {
  std::vector<std::vector<NodeId>> groups(2 * n_locations);
  for (std::size_t i = 0; i < rg.location.size(); ++i) {
    groups[2 * rg.location[i] + (rg.recruiter[i] ? 1 : 0)].push_back(i);
  }
  CommunityLabels labels;
  for (auto& g : groups)
    if (!g.empty()) labels.members.push_back(std::move(g));
  return labels;
}

Graph generate_threshold_graph(const DenseMatrix& b, const DenseMatrix& c, int t) {
  const std::size_t n = b.rows();
  if (c.cols() > 0 && c.rows() != n) {
    throw std::invalid_argument("threshold graph: B has " + std::to_string(n) + " rows, C has " +
                                std::to_string(c.rows()));
  }
  require_binary(b, "B");
  require_binary(c, "C");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double score = 0.0;
      for (std::size_t p = 0; p < b.cols(); ++p) score += b(i, p) * b(j, p);
      for (std::size_t p = 0; p < c.cols(); ++p) score -= c(i, p) * c(j, p);
      if (score >= static_cast<double>(t)) edges.emplace_back(i, j);
    }
  }
  return Graph(n, std::move(edges));
}

}  // namespace hetero
