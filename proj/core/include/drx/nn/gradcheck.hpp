#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "drx/nn/tensor.hpp"
#include "drx/rng.hpp"

namespace drx::nn {

struct GradCheckReport {
  struct Entry {
    std::string name;
    double max_relative_error = 0.0;
    std::size_t checked = 0;
  };
  std::vector<Entry> entries;
  double tolerance = 0.0;
  bool pass = false;

  double max_error() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.max_relative_error);
    return m;
  }
};

/// Central finite differences against analytic gradients.
///
/// `loss()` evaluates the scalar objective at the current parameter values;
/// `gradients()` must leave d(loss)/d(param) in every Param::grad. Up to
/// `per_tensor` randomly chosen scalars of each tensor are perturbed by
/// +/- `step`. The relative error of one entry is |a - n| / max(|a|, |n|, f),
/// with f = 1e-3 times the RMS analytic gradient over all tensors, so entries
/// whose exact gradient is zero (a bias feeding a batch norm) are measured
/// against the overall gradient scale rather than their own round-off.
template <class LossFn, class GradFn>
GradCheckReport grad_check(const std::vector<Param<double>*>& params, LossFn&& loss, GradFn&& gradients,
                           double tolerance, std::uint64_t seed, std::size_t per_tensor = 200,
                           double step = 1e-5) {
  for (auto* p : params) p->zero_grad();
  gradients();
  GradCheckReport report;
  report.tolerance = tolerance;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (auto* p : params) {
    for (double g : p->grad) sum_sq += g * g;
    count += p->size();
  }
  const double floor = std::max(1e-3 * std::sqrt(sum_sq / std::max<std::size_t>(count, 1)), 1e-12);
  Rng rng(seed);
  for (auto* p : params) {
    const std::vector<double> analytic = p->grad;

    std::vector<std::size_t> order(p->size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(std::min(per_tensor, order.size()));

    GradCheckReport::Entry entry{p->name, 0.0, order.size()};
    for (auto idx : order) {
      const double saved = p->value[idx];
      p->value[idx] = saved + step;
      const double up = loss();
      p->value[idx] = saved - step;
      const double down = loss();
      p->value[idx] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[idx];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      entry.max_relative_error = std::max(entry.max_relative_error, std::abs(a - numeric) / denom);
    }
    report.entries.push_back(entry);
  }
  report.pass = report.max_error() < tolerance;
  return report;
}

}  // namespace drx::nn
