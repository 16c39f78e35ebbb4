#include "cmcs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmcs {

MetricReport f1_score(std::span<const TrustLevel> predicted, std::span<const TrustLevel> truth) {
  if (predicted.empty()) throw std::invalid_argument("f1_score: empty input");
  if (predicted.size() != truth.size()) throw std::invalid_argument("f1_score: sequences differ in length");
  MetricReport m;
  m.count = truth.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto p = level_index(predicted[i]), t = level_index(truth[i]);
    ++m.per_class[t].support;
    ++m.per_class[p].predicted;
    if (p == t) {
      ++m.per_class[t].true_positive;
      ++correct;
    }
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.count);
  std::size_t present = 0;
  for (auto& c : m.per_class) {
    if (c.predicted) c.precision = static_cast<double>(c.true_positive) / static_cast<double>(c.predicted);
    if (c.support) c.recall = static_cast<double>(c.true_positive) / static_cast<double>(c.support);
    if (c.precision + c.recall > 0.0) c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
    m.weighted_f1 += c.f1 * static_cast<double>(c.support) / static_cast<double>(m.count);
    if (c.support || c.predicted) {
      m.macro_f1 += c.f1;
      ++present;
    }
  }
  if (present) m.macro_f1 /= static_cast<double>(present);
  return m;
}

double mae(std::span<const std::array<double, kNumLevels>> probs, std::span<const TrustLevel> truth) {
  if (probs.empty()) throw std::invalid_argument("mae: empty input");
  if (probs.size() != truth.size()) throw std::invalid_argument("mae: sequences differ in length");
  auto scale = [](double v) { return (v - 0.5) / 2.5; };
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double expected = 0.0;
    for (std::size_t c = 0; c < kNumLevels; ++c) expected += probs[i][c] * trust_value(kAllLevels[c]);
    total += std::abs(scale(expected) - scale(trust_value(truth[i])));
  }
  return total / static_cast<double>(probs.size());
}

MetricReport evaluate_predictions(std::span<const LevelPrediction> preds, std::span<const TrustLevel> truth) {
  std::vector<TrustLevel> levels;
  std::vector<std::array<double, kNumLevels>> probs;
  for (const auto& p : preds) {
    levels.push_back(p.level);
    probs.push_back(p.probs);
  }
  auto m = f1_score(levels, truth);
  m.mae = mae(probs, truth);
  return m;
}

MetricReport evaluate_edges(const TrustEvaluator& ev, std::span<const TrustEdge> edges) {
  std::vector<LevelPrediction> preds;
  std::vector<TrustLevel> truth;
  preds.reserve(edges.size());
  for (const auto& e : edges) {
    preds.push_back(ev.predict(e.src, e.dst));
    truth.push_back(e.level);
  }
  return evaluate_predictions(preds, truth);
}

TrustEvaluator make_evaluator(const TrainResult& r, const TrustGraph& observed, std::span<const TrustEdge> test) {
  TrustEvaluator ev(r.model, r.state, observed, r.message_graph, 1.0);
  if (test.empty()) return ev;
  const double acc = evaluate_edges(ev, test).accuracy;
  // An accuracy of exactly 0 is not a usable AUC; floor it at one hit.
  const double floor = 1.0 / static_cast<double>(test.size() + 1);
  return TrustEvaluator(r.model, r.state, observed, r.message_graph, std::max(acc, floor));
}

}  // namespace cmcs
