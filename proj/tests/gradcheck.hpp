// Central finite differences of the cross-entropy + L2 objective, evaluated
// through forward() / predict_level() / loss() only.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cmcs/tref.hpp"

namespace testing {

struct GradCheck {
  double max_rel_error{0.0};
  std::string worst_tensor;
  std::size_t entries{0};
};

inline double objective(const cmcs::PropagationGraph& pg, const Eigen::MatrixXd& x, const cmcs::TrefModel& m,
                        std::span<const cmcs::TrustEdge> batch, double l2) {
  const auto s = cmcs::forward(pg, x, m);
  std::vector<std::array<double, cmcs::kNumLevels>> preds;
  std::vector<cmcs::TrustLevel> labels;
  for (const auto& e : batch) {
    preds.push_back(cmcs::predict_level(s, m, e.src, e.dst).probs);
    labels.push_back(e.level);
  }
  return cmcs::loss(preds, labels, l2, m);
}

/// rel = |analytic - numeric| / max(|analytic|, |numeric|, 1e-8), over every entry.
inline GradCheck check_gradients(const cmcs::PropagationGraph& pg, const Eigen::MatrixXd& x, cmcs::TrefModel model,
                                 std::span<const cmcs::TrustEdge> batch, double l2, double step = 1e-5) {
  cmcs::TrefModel grad;
  cmcs::loss_and_gradient(pg, x, model, batch, l2, grad);
  GradCheck r;
  const auto names = model.tensor_names();
  auto params = model.tensors();
  auto grads = grad.tensors();
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& p = *params[t];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double orig = p.data()[i];
      p.data()[i] = orig + step;
      const double up = objective(pg, x, model, batch, l2);
      p.data()[i] = orig - step;
      const double down = objective(pg, x, model, batch, l2);
      p.data()[i] = orig;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = grads[t]->data()[i];
      const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      ++r.entries;
      if (rel > r.max_rel_error) {
        r.max_rel_error = rel;
        r.worst_tensor = names[t];
      }
    }
  }
  return r;
}

}  // namespace testing
