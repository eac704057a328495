#include "hetero/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hetero {

namespace {

void require_square_match(const DenseMatrix& a, const DenseMatrix& p, const char* op) {
  if (a.rows() != a.cols() || p.rows() != a.rows() || p.cols() != a.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

double edge_mass(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  if (s == 0.0) throw std::invalid_argument("reconstruction error is undefined for an edgeless graph");
  return s;
}

double clamped_bce(double a, double p, double lo) {
  p = std::clamp(p, lo, 1.0 - lo);
  return -(a * std::log(p) + (1.0 - a) * std::log1p(-p));
}

}  // namespace

ReconReport recon_report(const DenseMatrix& adjacency, const DenseMatrix& probabilities) {
  require_square_match(adjacency, probabilities, "recon_report");
  for (double p : probabilities.values())
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("recon_report: probability outside [0, 1]");
  const double mass = edge_mass(adjacency);
  ReconReport r;
  double sq = 0.0, ce = 0.0;
  auto a = adjacency.values();
  auto p = probabilities.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    sq += (a[i] - p[i]) * (a[i] - p[i]);
    ce += clamped_bce(a[i], p[i], 1e-16);
    if ((p[i] >= 0.5) != (a[i] == 1.0)) ++r.rounded_errors;
  }
  r.frob_normalized = sq / mass;
  r.ce_normalized = ce / static_cast<double>(a.size());
  return r;
}

ReconReport recon_report(const DenseMatrix& adjacency, const CommunityModel& model) {
  DenseMatrix logits = model.logits();
  require_square_match(adjacency, logits, "recon_report");
  const double mass = edge_mass(adjacency);
  ReconReport r;
  double sq = 0.0, ce = 0.0;
  auto a = adjacency.values();
  auto m = logits.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = sigmoid(m[i]);
    sq += (a[i] - p) * (a[i] - p);
    ce += bce_term(a[i], m[i]);
    if ((p >= 0.5) != (a[i] == 1.0)) ++r.rounded_errors;
  }
  r.frob_normalized = sq / mass;
  r.ce_normalized = ce / static_cast<double>(a.size());
  return r;
}

DenseMatrix svd_reconstruction(const EigenDecomposition& full, std::size_t k) {
  EigenDecomposition top;
  const std::size_t r = std::min(k, full.rank());
  top.eigvals.assign(full.eigvals.begin(), full.eigvals.begin() + static_cast<std::ptrdiff_t>(r));
  top.eigvecs = DenseMatrix(full.eigvecs.rows(), r);
  for (std::size_t i = 0; i < full.eigvecs.rows(); ++i)
    for (std::size_t j = 0; j < r; ++j) top.eigvecs(i, j) = full.eigvecs(i, j);
  return top.reconstruct();
}

DenseMatrix svd_baseline(const DenseMatrix& adjacency, std::size_t k) {
  return svd_reconstruction(sym_eigen(adjacency, 1e-12), k);
}

ReconReport svd_report(const DenseMatrix& adjacency, const DenseMatrix& reconstruction) {
  require_square_match(adjacency, reconstruction, "svd_report");
  const double mass = edge_mass(adjacency);
  ReconReport r;
  double sq = 0.0, ce = 0.0;
  auto a = adjacency.values();
  auto p = reconstruction.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    sq += (a[i] - p[i]) * (a[i] - p[i]);
    ce += clamped_bce(a[i], p[i], kSvdClip);
    if ((p[i] >= 0.5) != (a[i] == 1.0)) ++r.rounded_errors;
  }
  r.frob_normalized = sq / mass;
  r.ce_normalized = ce / static_cast<double>(a.size());
  return r;
}

CommunityLabels binarize_memberships(const CommunityModel& m, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("binarize_memberships: tau must be in (0, 1)");
  CommunityLabels out;
  for (std::size_t c = 0; c < m.k(); ++c) {
    std::vector<NodeId> members;
    for (std::size_t i = 0; i < m.num_nodes(); ++i)
      if (m.v(i, c) >= tau) members.push_back(i);
    if (!members.empty()) out.members.push_back(std::move(members));
  }
  return out;
}

double set_f1(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<NodeId> sa(a), sb(b);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<NodeId> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
  if (common.empty()) return 0.0;
  const double precision = static_cast<double>(common.size()) / static_cast<double>(sa.size());
  const double recall = static_cast<double>(common.size()) / static_cast<double>(sb.size());
  return 2.0 * precision * recall / (precision + recall);
}

double community_f1(const CommunityLabels& detected, const CommunityLabels& truth) {
  if (detected.members.empty() || truth.members.empty()) {
    throw std::invalid_argument("community_f1: both collections must be non-empty");
  }
  auto mean_best = [](const CommunityLabels& from, const CommunityLabels& against) {
    double total = 0.0;
    for (const auto& c : from.members) {
      double best = 0.0;
      for (const auto& d : against.members) best = std::max(best, set_f1(c, d));
      total += best;
    }
    return total / static_cast<double>(from.members.size());
  };
  return 0.5 * (mean_best(truth, detected) + mean_best(detected, truth));
}

HoldoutSplit make_holdout(std::size_t n, double frac, std::uint64_t seed) {
  if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("make_holdout: frac must be in (0, 1)");
  std::vector<Edge> pairs;
  pairs.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const auto count = static_cast<std::size_t>(std::llround(frac * static_cast<double>(pairs.size())));
  if (count == 0 || count == pairs.size()) {
    throw std::invalid_argument("make_holdout: held-out fraction leaves an empty side (" +
                                std::to_string(count) + " of " + std::to_string(pairs.size()) +
                                " pairs)");
  }
  // Partial Fisher-Yates: the first `count` slots become the held-out sample.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pairs.size() - 1);
    std::swap(pairs[i], pairs[pick(rng)]);
  }
  HoldoutSplit split;
  split.seed = seed;
  split.held_out.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(count));
  split.observed.assign(pairs.begin() + static_cast<std::ptrdiff_t>(count), pairs.end());
  std::sort(split.held_out.begin(), split.held_out.end());
  std::sort(split.observed.begin(), split.observed.end());
  return split;
}

DenseMatrix training_weights(const HoldoutSplit& split, std::size_t n) {
  DenseMatrix w(n, n, 1.0);
  for (const auto& [i, j] : split.held_out) {
    if (i >= n || j >= n) throw std::invalid_argument("training_weights: pair outside graph");
    w(i, j) = 0.0;
    w(j, i) = 0.0;
  }
  return w;
}

double random_baseline_f1(double density) { return density / (density + 0.5); }

LinkPredResult score_link_predictions(const CommunityModel& model, const Graph& g,
                                      const HoldoutSplit& split) {
  std::size_t positives = 0, predicted = 0, hits = 0;
  for (const auto& [i, j] : split.held_out) {
    const bool truth = g.has_edge(i, j);
    const bool guess = predict_prob(model, i, j) >= 0.5;
    positives += truth;
    predicted += guess;
    hits += truth && guess;
  }
  if (positives == 0) {
    throw std::runtime_error("held-out set contains no edges; F1 is undefined, try another seed");
  }
  LinkPredResult r;
  r.held_out_density = static_cast<double>(positives) / static_cast<double>(split.held_out.size());
  r.random_baseline_f1 = random_baseline_f1(r.held_out_density);
  r.recall = static_cast<double>(hits) / static_cast<double>(positives);
  r.precision = predicted == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(predicted);
  r.f1 = (r.precision + r.recall) == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

LinkPredRun link_prediction_experiment(const Graph& g, const HoldoutSplit& split,
                                       const PipelineConfig& cfg) {
  bool any_positive = false;
  for (const auto& [i, j] : split.held_out) any_positive = any_positive || g.has_edge(i, j);
  if (!any_positive) {
    throw std::runtime_error("held-out set contains no edges; F1 is undefined, try another seed");
  }
  const DenseMatrix weights = training_weights(split, g.num_nodes());
  LinkPredRun run;
  run.fit = fit_pipeline(adjacency_dense(g), cfg, &weights);
  run.scores = score_link_predictions(run.fit.model, g, split);
  return run;
}

namespace {

void write_optional(std::ostream& out, const std::optional<double>& v) {
  out << ',';
  if (v) out << *v;
}

}  // namespace

void write_metrics_header(std::ostream& out) {
  out << "variant,k,seed,frob_normalized,ce_normalized,rounded_errors,f1,precision,recall,"
         "random_baseline_f1,tau,note\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  std::ostringstream line;
  line << std::setprecision(10);
  line << row.variant << ',' << row.k << ',' << row.seed << ',';
  if (row.recon) {
    line << row.recon->frob_normalized << ',' << row.recon->ce_normalized << ','
         << row.recon->rounded_errors;
  } else {
    line << ",,";
  }
  write_optional(line, row.f1);
  write_optional(line, row.precision);
  write_optional(line, row.recall);
  write_optional(line, row.random_baseline_f1);
  write_optional(line, row.tau);
  std::string note = row.note;
  std::replace(note.begin(), note.end(), ',', ';');
  std::replace(note.begin(), note.end(), '\n', ' ');
  line << ',' << note << '\n';
  out << line.str();
}

std::vector<MetricsRow> reconstruction_sweep(const Graph& g, const SweepOptions& options) {
  if (options.k_values.empty()) throw std::invalid_argument("reconstruction_sweep: no k values");
  if (options.variants.empty()) throw std::invalid_argument("reconstruction_sweep: no variants");
  const DenseMatrix a = adjacency_dense(g);
  std::optional<EigenDecomposition> spectrum;
  std::vector<MetricsRow> rows;
  for (Variant variant : options.variants) {
    for (std::size_t k : options.k_values) {
      if (variant == Variant::svd) {
        if (!spectrum) spectrum = sym_eigen(a, 1e-12);
        MetricsRow row;
        row.variant = to_string(variant);
        row.k = k;
        row.seed = "-";
        row.recon = svd_report(a, svd_reconstruction(*spectrum, k));
        rows.push_back(std::move(row));
        continue;
      }
      for (std::uint64_t seed : options.seeds) {
        PipelineConfig cfg;
        cfg.k = k;
        cfg.fit = options.fit;
        cfg.fit.seed = seed;
        cfg.variant = variant;
        PipelineResult fit = fit_pipeline(a, cfg);
        MetricsRow row;
        row.variant = to_string(variant);
        row.k = k;
        row.seed = std::to_string(seed);
        row.recon = recon_report(a, fit.model);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace hetero
