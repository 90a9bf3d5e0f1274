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

// Discretized prefilter power allocation.
//
// Both problems distribute a unit budget sum_i w_i x_i = 1, x >= 0, where
// x_i = |G(e^{j w_i})|^2 / ||G||_2^2 and w_i are trapezoidal weights:
//
//   LMMSE:  minimize  sum_i w_i alpha_i / (beta_i x_i + 1)
//   DF:     maximize  sum_i w_i log(beta_i x_i + 1)
//
// The KKT conditions give closed forms in a scalar multiplier, found by
// bisection and then recomputed exactly from the resulting active set.

#ifndef DPFILTER_WATERFILL_H_
#define DPFILTER_WATERFILL_H_

#include <vector>

#include "absl/status/statusor.h"

namespace dpfilter {

class WaterfillProblem {
 public:
  static absl::StatusOr<WaterfillProblem> Create(std::vector<double> alpha,
                                                 std::vector<double> beta,
                                                 std::vector<double> weights);

  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& beta() const { return beta_; }
  const std::vector<double>& weights() const { return weights_; }
  size_t size() const { return alpha_.size(); }

 private:
  WaterfillProblem(std::vector<double> alpha, std::vector<double> beta,
                   std::vector<double> weights)
      : alpha_(std::move(alpha)),
        beta_(std::move(beta)),
        weights_(std::move(weights)) {}

  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> weights_;
};

struct WaterfillSolution {
  std::vector<double> x;
  // lambda for the LMMSE problem, the water level mu for the DF problem.
  double multiplier = 0.0;
  // Max relative stationarity / dual-feasibility violation.
  double kkt_residual = 0.0;
  // |sum_i w_i x_i - 1|.
  double constraint_residual = 0.0;
};

absl::StatusOr<WaterfillSolution> SolveWaterfillLmmse(
    const WaterfillProblem& problem);
absl::StatusOr<WaterfillSolution> SolveWaterfillDf(
    const WaterfillProblem& problem);

// Closed-form allocations for a given multiplier; these are what the solvers
// return and can be re-evaluated at frequencies off the design grid.
double LmmseAllocation(double alpha, double beta, double lambda);
double DfAllocation(double beta, double mu);

double LmmseObjective(const WaterfillProblem& problem,
                      const std::vector<double>& x);
double DfObjective(const WaterfillProblem& problem,
                   const std::vector<double>& x);

}  // namespace dpfilter

#endif  // DPFILTER_WATERFILL_H_
