#include "kpg/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace kpg {

GradCheckReport finite_difference_check(std::span<BlockParams* const> blocks,
                                         const std::function<double()>& loss, double tolerance,
                                         double step) {
  GradCheckReport report;
  for (auto* block : blocks) {
    for (auto& p : block->all()) {
      double max_diff = 0.0;
      double max_analytic = 0.0;
      double max_numeric = 0.0;
      for (Index i = 0; i < p.value.size(); ++i) {
        double& theta = p.value.data()[i];
        const double saved = theta;
        theta = saved + step;
        const double up = loss();
        theta = saved - step;
        const double down = loss();
        theta = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double analytic = p.grad.data()[i];
        max_diff = std::max(max_diff, std::abs(numeric - analytic));
        max_analytic = std::max(max_analytic, std::abs(analytic));
        max_numeric = std::max(max_numeric, std::abs(numeric));
      }
      const double denom = std::max({max_analytic, max_numeric, kGradCheckFloor});
      GradCheckEntry e{block->name() + "." + p.name, max_diff / denom};
      report.worst = std::max(report.worst, e.max_relative_error);
      report.entries.push_back(std::move(e));
    }
  }
  report.passed = report.worst <= tolerance;
  return report;
}

}  // namespace kpg
