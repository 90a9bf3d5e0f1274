//
// Copyright 2026 The dpfilter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpfilter/waterfill.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpfilter {
namespace {

constexpr double kMultiplierLow = 1e-18;
constexpr double kMultiplierHigh = 1e18;
constexpr int kMaxBisections = 200;

double Budget(const WaterfillProblem& problem, const std::vector<double>& x) {
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); ++i) sum += problem.weights()[i] * x[i];
  return sum;
}

}  // namespace

absl::StatusOr<WaterfillProblem> WaterfillProblem::Create(
    std::vector<double> alpha, std::vector<double> beta,
    std::vector<double> weights) {
  if (alpha.size() != beta.size() || alpha.size() != weights.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha, beta and weights differ in length (",
                     alpha.size(), ", ", beta.size(), ", ", weights.size(),
                     ")"));
  }
  if (alpha.empty()) {
    return absl::InvalidArgumentError("empty water-filling problem");
  }
  for (size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] >= 0.0) || !(beta[i] >= 0.0) || !(weights[i] >= 0.0) ||
        !std::isfinite(alpha[i]) || !std::isfinite(beta[i]) ||
        !std::isfinite(weights[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "alpha, beta and weights must be finite and nonnegative (index ", i,
          ")"));
    }
  }
  return WaterfillProblem(std::move(alpha), std::move(beta),
                          std::move(weights));
}

double LmmseAllocation(double alpha, double beta, double lambda) {
  if (!(beta > 0.0) || !(alpha > 0.0)) return 0.0;
  return std::max(0.0, (std::sqrt(alpha * beta / lambda) - 1.0) / beta);
}

double DfAllocation(double beta, double mu) {
  if (!(beta > 0.0)) return 0.0;
  return std::max(0.0, mu - 1.0 / beta);
}

double LmmseObjective(const WaterfillProblem& problem,
                      const std::vector<double>& x) {
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sum += problem.weights()[i] * problem.alpha()[i] /
           (problem.beta()[i] * x[i] + 1.0);
  }
  return sum;
}

double DfObjective(const WaterfillProblem& problem,
                   const std::vector<double>& x) {
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sum += problem.weights()[i] * std::log1p(problem.beta()[i] * x[i]);
  }
  return sum;
}

absl::StatusOr<WaterfillSolution> SolveWaterfillLmmse(
    const WaterfillProblem& problem) {
  const auto& alpha = problem.alpha();
  const auto& beta = problem.beta();
  const auto& w = problem.weights();
  const size_t n = problem.size();
  double useful = 0.0;
  for (size_t i = 0; i < n; ++i) useful += w[i] * alpha[i] * beta[i];
  if (!(useful > 0.0)) {
    return absl::FailedPreconditionError(
        "no grid point has alpha_i * beta_i * w_i > 0; the budget cannot be "
        "allocated");
  }

  auto allocate = [&](double lambda) {
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = LmmseAllocation(alpha[i], beta[i], lambda);
    return x;
  };
  // Budget(lambda) is nonincreasing; bisect in log scale.
  double lo = std::log(kMultiplierLow);
  double hi = std::log(kMultiplierHigh);
  for (int it = 0; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (Budget(problem, allocate(std::exp(mid))) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double lambda = std::exp(0.5 * (lo + hi));

  // On the active set, 1/sqrt(lambda) sum w sqrt(alpha/beta) = 1 + sum w/beta.
  double root_sum = 0.0;
  double inv_sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (LmmseAllocation(alpha[i], beta[i], lambda) > 0.0) {
      root_sum += w[i] * std::sqrt(alpha[i] / beta[i]);
      inv_sum += w[i] / beta[i];
    }
  }
  if (root_sum > 0.0) {
    const double exact = std::pow(root_sum / (1.0 + inv_sum), 2.0);
    std::vector<double> x = allocate(exact);
    if (std::abs(Budget(problem, x) - 1.0) <
        std::abs(Budget(problem, allocate(lambda)) - 1.0)) {
      lambda = exact;
    }
  }

  WaterfillSolution solution;
  solution.x = allocate(lambda);
  solution.multiplier = lambda;
  solution.constraint_residual = std::abs(Budget(problem, solution.x) - 1.0);
  for (size_t i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    // Marginal benefit of x_i, alpha beta / (beta x + 1)^2, against lambda.
    const double marginal = alpha[i] * beta[i] /
                            std::pow(beta[i] * solution.x[i] + 1.0, 2.0);
    const double violation = solution.x[i] > 0.0
                                 ? std::abs(marginal - lambda)
                                 : std::max(0.0, marginal - lambda);
    solution.kkt_residual = std::max(solution.kkt_residual, violation / lambda);
  }
  return solution;
}

absl::StatusOr<WaterfillSolution> SolveWaterfillDf(
    const WaterfillProblem& problem) {
  const auto& beta = problem.beta();
  const auto& w = problem.weights();
  const size_t n = problem.size();
  double active_weight = 0.0;
  double active_inverse = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (beta[i] > 0.0 && w[i] > 0.0) {
      active_weight += w[i];
      active_inverse += w[i] / beta[i];
    }
  }
  if (!(active_weight > 0.0)) {
    return absl::FailedPreconditionError(
        "no grid point has beta_i * w_i > 0; the budget cannot be allocated");
  }

  auto allocate = [&](double mu) {
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = DfAllocation(beta[i], mu);
    return x;
  };
  // Budget(mu) is nondecreasing; at the upper end every beta > 0 is active.
  double lo = 0.0;
  double hi = (1.0 + active_inverse) / active_weight;
  for (int it = 0; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (Budget(problem, allocate(mid)) > 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  double mu = 0.5 * (lo + hi);

  double weight_sum = 0.0;
  double inv_sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (DfAllocation(beta[i], mu) > 0.0) {
      weight_sum += w[i];
      inv_sum += w[i] / beta[i];
    }
  }
  if (weight_sum > 0.0) {
    const double exact = (1.0 + inv_sum) / weight_sum;
    if (std::abs(Budget(problem, allocate(exact)) - 1.0) <
        std::abs(Budget(problem, allocate(mu)) - 1.0)) {
      mu = exact;
    }
  }

  WaterfillSolution solution;
  solution.x = allocate(mu);
  solution.multiplier = mu;
  solution.constraint_residual = std::abs(Budget(problem, solution.x) - 1.0);
  // Stationarity: beta / (beta x + 1) = 1 / mu on the active set, <= 1/mu off.
  for (size_t i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    const double marginal = beta[i] / (beta[i] * solution.x[i] + 1.0);
    const double violation = solution.x[i] > 0.0
                                 ? std::abs(marginal * mu - 1.0)
                                 : std::max(0.0, marginal * mu - 1.0);
    solution.kkt_residual = std::max(solution.kkt_residual, violation);
  }
  return solution;
}

}  // namespace dpfilter
