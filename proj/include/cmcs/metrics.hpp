#pragma once

#include <array>
#include <chrono>
#include <span>
#include <utility>

#include "cmcs/graph_store.hpp"
#include "cmcs/tref.hpp"

namespace cmcs {

struct ClassScore {
  std::size_t support{0};    // true instances
  std::size_t predicted{0};
  std::size_t true_positive{0};
  double precision{0.0};
  double recall{0.0};
  double f1{0.0};
};

struct MetricReport {
  std::size_t count{0};
  double weighted_f1{0.0};  // support-weighted mean of per-class F1
  double macro_f1{0.0};     // mean over classes that occur in truth or prediction
  double accuracy{0.0};
  double mae{0.0};          // expectation-valued, on the [0,1] value scale
  std::array<ClassScore, kNumLevels> per_class{};
};

/// Per-class and averaged F1 over aligned label sequences. Throws
/// std::invalid_argument on empty or misaligned input.
MetricReport f1_score(std::span<const TrustLevel> predicted, std::span<const TrustLevel> truth);

/// Mean |E[v] - v_true| with values rescaled to [0,1] by (v - 0.5) / 2.5.
double mae(std::span<const std::array<double, kNumLevels>> probs, std::span<const TrustLevel> truth);

/// F1 report plus MAE from model output distributions.
MetricReport evaluate_predictions(std::span<const LevelPrediction> preds, std::span<const TrustLevel> truth);

/// Scores held-out edges with the evaluator's model.
MetricReport evaluate_edges(const TrustEvaluator& ev, std::span<const TrustEdge> edges);

/// Wraps a training result; the evaluator's accuracy (the AUC used for
/// privacy loss) is exact-match accuracy on `test`, or 1 when `test` is empty.
TrustEvaluator make_evaluator(const TrainResult& r, const TrustGraph& observed, std::span<const TrustEdge> test);

/// Wall-clock milliseconds of `fn()` on the monotonic clock.
template <typename Fn>
double time_ms(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  std::forward<Fn>(fn)();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace cmcs
