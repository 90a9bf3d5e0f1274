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


// Per-sample execution of a mechanism design.
//
// The privacy boundary is carried by the types: raw inputs are PrivateSample
// values, which only PrivatizingFrontEnd accepts. Everything downstream of the
// noise (Reconstructor, ReleaseView) sees ReleasedSample values and nothing
// else.

#ifndef DPFILTER_RUNTIME_H_
#define DPFILTER_RUNTIME_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfilter/design.h"
#include "dpfilter/lti.h"
#include "dpfilter/random.h"

namespace dpfilter {

class PrivateSample {
 public:
  explicit PrivateSample(double value) : value_(value) {}

 private:
  friend class PrivatizingFrontEnd;
  double value_;
};

class ReleasedSample {
 public:
  explicit ReleasedSample(double value) : value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

struct FrontEndOptions {
  uint64_t seed = 0;
  // Testing only: releases G(u - mu) without noise.
  bool disable_noise = false;
  bool record_noise = false;
};

// Computes v_t = (G (u - mu))_t + n_t with exactly one noise draw per sample.
class PrivatizingFrontEnd {
 public:
  PrivatizingFrontEnd(const MechanismDesign& design, double input_mean,
                      const FrontEndOptions& options);

  absl::StatusOr<ReleasedSample> Release(PrivateSample u);

  double noise_sigma() const { return sigma_; }
  int64_t samples() const { return samples_; }
  int64_t noise_draws() const { return noise_draws_; }
  const std::vector<double>& recorded_noise() const { return noise_; }

 private:
  RationalFilter prefilter_;
  double input_mean_;
  double sigma_;
  bool record_noise_;
  GaussianGenerator gaussian_;
  int64_t samples_ = 0;
  int64_t noise_draws_ = 0;
  std::vector<double> noise_;
};

// Maps the released stream to estimates of y. Consume() returns the estimate
// of y at index t - release_delay(), or nothing while the delay fills.
class Reconstructor {
 public:
  virtual ~Reconstructor() = default;

  virtual std::optional<double> Consume(ReleasedSample v) = 0;
  virtual int release_delay() const = 0;

  static std::unique_ptr<Reconstructor> Create(const MechanismDesign& design,
                                               double input_mean);
};

class LinearReconstructor : public Reconstructor {
 public:
  LinearReconstructor(const LinearReconstruction& reconstruction,
                      double output_mean);

  std::optional<double> Consume(ReleasedSample v) override;
  int release_delay() const override { return stage_.latency(); }

 private:
  FirFilter stage_;
  RationalFilter post_;
  double output_mean_;
  int64_t clock_ = 0;
};

class DecisionFeedbackReconstructor : public Reconstructor {
 public:
  DecisionFeedbackReconstructor(
      const DecisionFeedbackReconstruction& reconstruction, double input_mean,
      double output_mean);

  std::optional<double> Consume(ReleasedSample v) override;
  int release_delay() const override { return forward_.latency(); }

  // Decision for the most recent estimated index.
  double last_decision() const { return last_decision_; }
  size_t feedback_length() const { return decisions_.size(); }

 private:
  FirFilter forward_;
  std::vector<double> feedback_taps_;  // h2_1 .. h2_nb
  // Centered past decisions, newest first.
  std::vector<double> decisions_;
  DecisionDevice decision_;
  OutputMode mode_;
  RationalFilter output_;
  double input_mean_;
  double output_mean_;
  double last_decision_ = 0.0;
  int64_t clock_ = 0;
};

// Consumer-facing view of a run: released and published streams only.
class ReleaseView {
 public:
  ReleaseView(std::span<const double> v, std::span<const double> y_hat)
      : v_(v), y_hat_(y_hat) {}

  std::span<const double> v() const { return v_; }
  // y_hat()[i] estimates y at index i.
  std::span<const double> y_hat() const { return y_hat_; }

 private:
  std::span<const double> v_;
  std::span<const double> y_hat_;
};

struct StepOutput {
  double v = 0.0;
  std::optional<double> y_hat;
};

struct StreamSample {
  int64_t t = 0;
  double u = 0.0;
  double v = 0.0;
  double y_ref = 0.0;
  std::optional<double> y_hat;  // estimate of y_ref at the same index
};

struct RunOptions {
  // Samples discarded before the error average; negative selects ten times
  // the total filter order.
  int64_t transient = -1;
  bool keep_trace = true;
};

struct StreamReport {
  std::vector<StreamSample> trace;
  double mse = 0.0;
  int64_t error_samples = 0;
  int64_t transient = 0;
  int release_delay = 0;
  uint64_t seed = 0;
};

class MechanismInstance {
 public:
  static absl::StatusOr<MechanismInstance> Create(
      MechanismDesign design, double input_mean,
      const FrontEndOptions& options = {});

  // A fresh instance of the same, already validated, design and input mean
  // with new front-end options. Skips the stability checks of Create().
  MechanismInstance Fork(const FrontEndOptions& options) const;

  MechanismInstance(MechanismInstance&&) = default;
  MechanismInstance& operator=(MechanismInstance&&) = default;

  absl::StatusOr<StepOutput> Process(double u);

  // Processes u from the current state. y_ref, when given, must have the
  // length of u; otherwise F u is computed alongside.
  absl::StatusOr<StreamReport> Run(std::span<const double> u,
                                   std::optional<std::span<const double>> y_ref,
                                   const RunOptions& options = {});

  ReleaseView release_stream() const { return ReleaseView(released_, published_); }

  const MechanismDesign& design() const { return design_; }
  int release_delay() const { return reconstructor_->release_delay(); }
  double input_mean() const { return input_mean_; }
  uint64_t seed() const { return seed_; }
  int64_t clock() const { return clock_; }
  const PrivatizingFrontEnd& front_end() const { return *front_end_; }

  // Sum of the orders of the filters in the pipeline.
  int64_t total_order() const;

 private:
  MechanismInstance(MechanismDesign design, double input_mean,
                    const FrontEndOptions& options);

  MechanismDesign design_;
  double input_mean_;
  uint64_t seed_;
  std::unique_ptr<PrivatizingFrontEnd> front_end_;
  std::unique_ptr<Reconstructor> reconstructor_;
  std::vector<double> released_;
  std::vector<double> published_;
  int64_t clock_ = 0;
};

// CSV with header t,u,v,y_ref,y_hat and 17 significant digits; y_hat is
// empty where no estimate exists. Writes trace rows [begin, begin + count).
void WriteTraceCsv(const StreamReport& report, std::ostream& out,
                   size_t begin = 0, size_t count = SIZE_MAX);

// "%.17g" with '.' as decimal separator regardless of locale.
std::string FormatDouble(double value);

}  // namespace dpfilter

#endif  // DPFILTER_RUNTIME_H_
