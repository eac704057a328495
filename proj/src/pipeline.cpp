#include "hetero/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hetero {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::homophily_only: return "homophily-only";
    case Variant::svd: return "svd";
  }
  return "unknown";
}

Variant parse_variant(std::string_view s) {
  if (s == "full") return Variant::full;
  if (s == "homophily-only" || s == "homophily_only") return Variant::homophily_only;
  if (s == "svd") return Variant::svd;
  throw std::invalid_argument("unknown variant '" + std::string(s) + "'");
}

namespace {

template <typename F>
auto run_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, "not-run", e.what());
  }
}

void check_trace(const char* stage, const StageTrace& trace) {
  if (trace.loss_history.empty() || !std::isfinite(trace.loss_history.back())) {
    throw StageError(stage, std::string(to_string(trace.status)), "loss is not finite");
  }
}

}  // namespace

PipelineResult fit_pipeline(const DenseMatrix& adjacency, const PipelineConfig& cfg,
                            const DenseMatrix* weights) {
  if (cfg.variant == Variant::svd) {
    throw std::invalid_argument("fit_pipeline: the svd variant has no factor pipeline");
  }
  if (cfg.k < 1) throw std::invalid_argument("fit_pipeline: k must be >= 1");

  PipelineResult out;
  out.stage1 = run_stage("stage1", [&] { return fit_lpca(adjacency, cfg.k, cfg.fit, weights); });
  check_trace("stage1", out.stage1.trace);
  out.initial = run_stage("stage2", [&] { return init_constrained(out.stage1.factors, cfg.eigen_tol); });

  NonnegFactors candidates = out.initial;
  if (cfg.variant == Variant::homophily_only) {
    candidates.c = DenseMatrix(candidates.b.rows(), 0);
  }
  const std::size_t keep = std::min(cfg.k, candidates.width());
  if (keep == 0) {
    // Degenerate stage-1 logits (all eigenvalues truncated): nothing to refine.
    out.pruned = NonnegFactors{DenseMatrix(adjacency.rows(), 0), DenseMatrix(adjacency.rows(), 0)};
  } else {
    out.pruned = prune_columns(candidates, keep);
  }
  out.stage3 = run_stage("stage3", [&] { return fit_constrained(adjacency, out.pruned, cfg.fit, weights); });
  check_trace("stage3", out.stage3.trace);
  out.model = to_vw(out.stage3.factors);
  return out;
}

}  // namespace hetero
