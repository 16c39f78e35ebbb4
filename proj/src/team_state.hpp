// Incremental QoD bookkeeping shared by the swap-based solvers.
#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "cmcs/benefits.hpp"

namespace cmcs::detail {

class TeamState {
 public:
  TeamState(const PairMatrix& w, std::vector<std::size_t> team) : w_(&w), in_(w.size(), 0), sums_(w.size(), 0.0) {
    reset(std::move(team));
  }

  void reset(std::vector<std::size_t> team) {
    members_ = std::move(team);
    std::fill(in_.begin(), in_.end(), 0);
    std::fill(sums_.begin(), sums_.end(), 0.0);
    for (auto m : members_) in_[m] = 1;
    for (std::size_t c = 0; c < sums_.size(); ++c)
      for (auto m : members_) sums_[c] += (*w_)(c, m);
    total_ = 0.0;
    for (auto m : members_) total_ += sums_[m];
    total_ *= 0.5;
  }

  /// Pair-weight total after swapping member `out` for non-member `in`.
  double total_after_swap(std::size_t out, std::size_t in) const {
    return total_ - sums_[out] + sums_[in] - (*w_)(out, in);
  }

  void apply_swap(std::size_t out, std::size_t in) {
    total_ = total_after_swap(out, in);
    for (std::size_t c = 0; c < sums_.size(); ++c) sums_[c] += (*w_)(c, in) - (*w_)(c, out);
    in_[out] = 0;
    in_[in] = 1;
    *std::find(members_.begin(), members_.end(), out) = in;
  }

  double qod_of(double total) const {
    const double k = static_cast<double>(members_.size());
    return 2.0 * total / (k * (k - 1.0));
  }
  double qod() const { return qod_of(total_); }
  double total() const { return total_; }
  double sum_to_team(std::size_t c) const { return sums_[c]; }
  bool contains(std::size_t c) const { return in_[c] != 0; }
  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t n() const { return sums_.size(); }

  std::vector<std::size_t> sorted() const {
    auto t = members_;
    std::sort(t.begin(), t.end());
    return t;
  }

 private:
  const PairMatrix* w_;
  std::vector<char> in_;
  std::vector<double> sums_;
  std::vector<std::size_t> members_;
  double total_{0.0};
};

inline std::vector<std::size_t> random_team(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline void require_feasible(const Ucrg& g, const char* who) {
  if (g.size() < g.task.team_size) {
    throw InfeasibleTask(std::string(who) + ": task " + g.task.id + " has " + std::to_string(g.size()) +
                         " candidates for a team of " + std::to_string(g.task.team_size));
  }
  if (g.task.team_size < 2) throw std::invalid_argument(std::string(who) + ": team_size must be >= 2");
}

}  // namespace cmcs::detail
