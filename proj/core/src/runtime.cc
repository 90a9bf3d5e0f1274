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


#include "dpfilter/runtime.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>
#include <variant>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "status_macros.h"

namespace dpfilter {

PrivatizingFrontEnd::PrivatizingFrontEnd(const MechanismDesign& design,
                                         double input_mean,
                                         const FrontEndOptions& options)
    : prefilter_(design.prefilter),
      input_mean_(input_mean),
      sigma_(options.disable_noise ? 0.0 : design.calibration.sigma),
      record_noise_(options.record_noise),
      gaussian_(options.seed) {}

absl::StatusOr<ReleasedSample> PrivatizingFrontEnd::Release(PrivateSample u) {
  if (!std::isfinite(u.value_)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("non-finite input at sample %d", samples_));
  }
  const double shaped = prefilter_.StepUnchecked(u.value_ - input_mean_);
  const double noise = sigma_ * gaussian_.Next();
  ++noise_draws_;
  ++samples_;
  if (record_noise_) noise_.push_back(noise);
  return ReleasedSample(shaped + noise);
}

// ---------------------------------------------------------------------------

std::unique_ptr<Reconstructor> Reconstructor::Create(
    const MechanismDesign& design, double input_mean) {
  if (const auto* linear =
          std::get_if<LinearReconstruction>(&design.reconstruction)) {
    return std::make_unique<LinearReconstructor>(
        *linear, design.target.Evaluate(0.0).real() * input_mean);
  }
  const auto& df =
      std::get<DecisionFeedbackReconstruction>(design.reconstruction);
  return std::make_unique<DecisionFeedbackReconstructor>(
      df, input_mean, df.output_filter.Evaluate(0.0).real() * input_mean);
}

LinearReconstructor::LinearReconstructor(
    const LinearReconstruction& reconstruction, double output_mean)
    : stage_(reconstruction.stage),
      post_(reconstruction.post),
      output_mean_(output_mean) {}

std::optional<double> LinearReconstructor::Consume(ReleasedSample v) {
  const double staged = stage_.StepUnchecked(v.value());
  if (clock_++ < stage_.latency()) return std::nullopt;
  return post_.StepUnchecked(staged) + output_mean_;
}

DecisionFeedbackReconstructor::DecisionFeedbackReconstructor(
    const DecisionFeedbackReconstruction& reconstruction, double input_mean,
    double output_mean)
    : forward_(reconstruction.forward),
      decision_(reconstruction.decision),
      mode_(reconstruction.output_mode),
      output_(reconstruction.output_filter),
      input_mean_(input_mean),
      output_mean_(output_mean) {
  for (int j = 1; j <= reconstruction.feedback.end_index(); ++j) {
    feedback_taps_.push_back(reconstruction.feedback.tap(j));
  }
  decisions_.assign(feedback_taps_.size(), 0.0);
}

std::optional<double> DecisionFeedbackReconstructor::Consume(ReleasedSample v) {
  const double forward = forward_.StepUnchecked(v.value());
  if (clock_++ < forward_.latency()) return std::nullopt;
  double feedback = 0.0;
  for (size_t j = 0; j < feedback_taps_.size(); ++j) {
    feedback += feedback_taps_[j] * decisions_[j];
  }
  const double estimate = forward - feedback;
  last_decision_ = decision_.Decide(estimate + input_mean_);
  const double centered = last_decision_ - input_mean_;
  if (!decisions_.empty()) {
    std::copy_backward(decisions_.begin(), decisions_.end() - 1,
                       decisions_.end());
    decisions_[0] = centered;
  }
  const double x = mode_ == OutputMode::kSoft ? estimate : centered;
  return output_.StepUnchecked(x) + output_mean_;
}

// ---------------------------------------------------------------------------

MechanismInstance::MechanismInstance(MechanismDesign design, double input_mean,
                                     const FrontEndOptions& options)
    : design_(std::move(design)),
      input_mean_(input_mean),
      seed_(options.seed),
      front_end_(std::make_unique<PrivatizingFrontEnd>(design_, input_mean,
                                                       options)),
      reconstructor_(Reconstructor::Create(design_, input_mean)) {}

absl::StatusOr<MechanismInstance> MechanismInstance::Create(
    MechanismDesign design, double input_mean, const FrontEndOptions& options) {
  if (!std::isfinite(input_mean)) {
    return absl::InvalidArgumentError("input mean must be finite");
  }
  if (!(design.calibration.sigma >= 0.0) ||
      !std::isfinite(design.calibration.sigma)) {
    return absl::InvalidArgumentError("noise sigma must be finite and >= 0");
  }
  if (!design.prefilter.IsStable() || !design.target.IsStable()) {
    return absl::FailedPreconditionError("prefilter or target is unstable");
  }
  if (const auto* linear =
          std::get_if<LinearReconstruction>(&design.reconstruction)) {
    if (!linear->post.IsStable()) {
      return absl::FailedPreconditionError("reconstruction is unstable");
    }
  } else if (!std::get<DecisionFeedbackReconstruction>(design.reconstruction)
                  .output_filter.IsStable()) {
    return absl::FailedPreconditionError("output filter is unstable");
  }
  return MechanismInstance(std::move(design), input_mean, options);
}

MechanismInstance MechanismInstance::Fork(
    const FrontEndOptions& options) const {
  return MechanismInstance(design_, input_mean_, options);
}

int64_t MechanismInstance::total_order() const {
  int64_t order = design_.prefilter.order();
  if (const auto* linear =
          std::get_if<LinearReconstruction>(&design_.reconstruction)) {
    order += static_cast<int64_t>(linear->stage.taps().size()) - 1 +
             linear->post.order();
  } else {
    const auto& df =
        std::get<DecisionFeedbackReconstruction>(design_.reconstruction);
    order += static_cast<int64_t>(df.forward.taps().size()) - 1 +
             df.feedback.end_index() + df.output_filter.order();
  }
  return order;
}

absl::StatusOr<StepOutput> MechanismInstance::Process(double u) {
  DPFILTER_ASSIGN_OR_RETURN(ReleasedSample v,
                            front_end_->Release(PrivateSample(u)));
  ++clock_;
  if (front_end_->noise_draws() != clock_) {
    std::fprintf(stderr,
                 "dpfilter: noise draws (%lld) out of step with clock (%lld)\n",
                 static_cast<long long>(front_end_->noise_draws()),
                 static_cast<long long>(clock_));
    std::abort();
  }
  StepOutput out{v.value(), reconstructor_->Consume(v)};
  released_.push_back(out.v);
  if (out.y_hat.has_value()) published_.push_back(*out.y_hat);
  return out;
}

absl::StatusOr<StreamReport> MechanismInstance::Run(
    std::span<const double> u, std::optional<std::span<const double>> y_ref,
    const RunOptions& options) {
  if (y_ref.has_value() && y_ref->size() != u.size()) {
    return absl::InvalidArgumentError("y_ref and u differ in length");
  }
  StreamReport report;
  report.release_delay = release_delay();
  report.seed = seed_;
  report.transient =
      options.transient >= 0 ? options.transient : 10 * total_order();
  const size_t n = u.size();
  if (n == 0) return report;

  std::vector<double> reference(n);
  if (y_ref.has_value()) {
    std::copy(y_ref->begin(), y_ref->end(), reference.begin());
  } else {
    // Evaluation only: the reference sees raw u, the mechanism does not.
    RationalFilter target(design_.target);
    for (size_t i = 0; i < n; ++i) reference[i] = target.StepUnchecked(u[i]);
  }
  if (options.keep_trace) report.trace.resize(n);

  const int64_t start = clock_;
  const int64_t delay = report.release_delay;
  double sum = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < n; ++i) {
    DPFILTER_ASSIGN_OR_RETURN(StepOutput step, Process(u[i]));
    if (options.keep_trace) {
      report.trace[i] = {start + static_cast<int64_t>(i), u[i], step.v,
                         reference[i], std::nullopt};
    }
    if (!step.y_hat.has_value()) continue;
    const int64_t index = static_cast<int64_t>(i) - delay;
    if (index < 0) continue;
    if (options.keep_trace) report.trace[index].y_hat = step.y_hat;
    if (index >= report.transient) {
      const double e = reference[index] - *step.y_hat;
      sum += e * e;
      ++count;
    }
  }
  report.error_samples = count;
  report.mse = count > 0 ? sum / count : 0.0;
  return report;
}

std::string FormatDouble(double value) {
  return absl::StrFormat("%.17g", value);
}

void WriteTraceCsv(const StreamReport& report, std::ostream& out,
                   size_t begin, size_t count) {
  out << "t,u,v,y_ref,y_hat\n";
  const size_t first = std::min(begin, report.trace.size());
  const size_t last = first + std::min(count, report.trace.size() - first);
  for (size_t i = first; i < last; ++i) {
    const StreamSample& s = report.trace[i];
    out << s.t << ',' << FormatDouble(s.u) << ',' << FormatDouble(s.v) << ','
        << FormatDouble(s.y_ref) << ',';
    if (s.y_hat.has_value()) out << FormatDouble(*s.y_hat);
    out << '\n';
  }
}

}  // namespace dpfilter
