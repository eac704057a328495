#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "hetero/constrained.hpp"
#include "hetero/lpca.hpp"
#include "hetero/nninit.hpp"

namespace hetero {

enum class Variant {
  full,            // homophilous and heterophilous communities
  homophily_only,  // ablation: heterophilous side dropped before stage 3
  svd,             // truncated eigendecomposition baseline (not a pipeline fit)
};
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct PipelineConfig {
  std::size_t k = 8;
  FitConfig fit;
  Variant variant = Variant::full;
  double eigen_tol = kDefaultEigenTol;
};

struct PipelineResult {
  LpcaFit stage1;
  NonnegFactors initial;  // stage 2 output, before pruning
  NonnegFactors pruned;
  ConstrainedFit stage3;
  CommunityModel model;
};

// A pipeline stage failed: bad input, a solver error, or a non-finite loss.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string status, const std::string& what)
      : std::runtime_error(stage + " (" + status + "): " + what),
        stage_(std::move(stage)),
        status_(std::move(status)) {}
  const std::string& stage() const { return stage_; }
  const std::string& status() const { return status_; }

 private:
  std::string stage_;
  std::string status_;
};

// LPCA -> nonnegative initialization -> prune to k -> constrained fit -> (V, w).
// Stage 1 uses rank k. When stage 2 yields k or fewer columns nothing is
// pruned. `weights` masks entries out of both training stages. Failures are
// rethrown as StageError naming the stage.
PipelineResult fit_pipeline(const DenseMatrix& adjacency, const PipelineConfig& cfg,
                            const DenseMatrix* weights = nullptr);

}  // namespace hetero
