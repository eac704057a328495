#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetero/constrained.hpp"
#include "hetero/graph.hpp"
#include "hetero/linalg.hpp"
#include "hetero/pipeline.hpp"

namespace hetero {

struct ReconReport {
  double frob_normalized = 0.0;  // |A - P|_F^2 / sum(A)
  double ce_normalized = 0.0;    // summed BCE / n^2
  std::size_t rounded_errors = 0;  // entries with (P >= 0.5) != A, diagonal included
};

// P must lie in [0, 1]. Probabilities are clamped away from {0, 1} by 1e-16
// inside the logarithms only.
ReconReport recon_report(const DenseMatrix& adjacency, const DenseMatrix& probabilities);

// Report for a fitted model; cross-entropy is evaluated from logits so it
// stays finite when probabilities saturate.
ReconReport recon_report(const DenseMatrix& adjacency, const CommunityModel& model);

inline constexpr double kSvdClip = 1e-6;

// Rank-k reconstruction from the k eigenpairs of largest |lambda|.
DenseMatrix svd_baseline(const DenseMatrix& adjacency, std::size_t k);
DenseMatrix svd_reconstruction(const EigenDecomposition& full, std::size_t k);

// Report for an unbounded reconstruction: Frobenius and rounding use the raw
// values, cross-entropy uses values clipped to [kSvdClip, 1 - kSvdClip].
ReconReport svd_report(const DenseMatrix& adjacency, const DenseMatrix& reconstruction);

// Node i joins community c iff V_ic >= tau. Empty communities are dropped.
CommunityLabels binarize_memberships(const CommunityModel& m, double tau);

double set_f1(const std::vector<NodeId>& a, const std::vector<NodeId>& b);

// Symmetric average best-match F1.
double community_f1(const CommunityLabels& detected, const CommunityLabels& truth);

struct HoldoutSplit {
  std::vector<Edge> observed;
  std::vector<Edge> held_out;
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultHoldoutFrac = 0.1;

// Uniform sample of round(frac * n(n-1)/2) node pairs to hold out.
HoldoutSplit make_holdout(std::size_t n, double frac, std::uint64_t seed);

// 0/1 loss weights: zero on held-out pairs (both orientations), one elsewhere
// including the diagonal.
DenseMatrix training_weights(const HoldoutSplit& split, std::size_t n);

struct LinkPredResult {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double random_baseline_f1 = 0.0;
  double held_out_density = 0.0;
};

// A fair-coin predictor on held-out density d: precision d, recall 1/2.
double random_baseline_f1(double density);

// Positive-class scores of predictions (probability >= 0.5) on held-out pairs.
LinkPredResult score_link_predictions(const CommunityModel& model, const Graph& g,
                                      const HoldoutSplit& split);

struct LinkPredRun {
  LinkPredResult scores;
  PipelineResult fit;
};

// Trains on observed pairs only, then scores held-out pairs. Throws when the
// held-out set has no edges.
LinkPredRun link_prediction_experiment(const Graph& g, const HoldoutSplit& split,
                                       const PipelineConfig& cfg);

// One CSV row. Unset optional columns are written empty.
struct MetricsRow {
  std::string variant;
  std::size_t k = 0;
  std::string seed;
  std::optional<ReconReport> recon;
  std::optional<double> f1;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> random_baseline_f1;
  std::optional<double> tau;
  std::string note;
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);

struct SweepOptions {
  std::vector<std::size_t> k_values;
  std::vector<Variant> variants;
  std::vector<std::uint64_t> seeds{0};
  FitConfig fit;
};

// One row per (variant, k, seed). The svd variant is deterministic and is
// reported once per k with seed column "-".
std::vector<MetricsRow> reconstruction_sweep(const Graph& g, const SweepOptions& options);

}  // namespace hetero
