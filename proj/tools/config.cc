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

#include "config.h"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"
#include "absl/types/span.h"

namespace dpfilter::cli {
namespace {

using nlohmann::json;

std::string Child(const std::string& path, absl::string_view key) {
  return path.empty() ? std::string(key) : absl::StrCat(path, ".", key);
}

std::string Index(const std::string& path, size_t i) {
  return absl::StrCat(path, "[", i, "]");
}

absl::Status FieldError(const std::string& path, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", message));
}

absl::Status Prefixed(const std::string& path, const absl::Status& status) {
  return FieldError(path, status.message());
}

// Holds one JSON object and the path leading to it.
class ObjectReader {
 public:
  static absl::StatusOr<ObjectReader> Create(const json& value,
                                             std::string path) {
    if (!value.is_object()) {
      return FieldError(path.empty() ? "<root>" : path, "expected an object");
    }
    return ObjectReader(value, std::move(path));
  }

  absl::Status CheckKeys(
      std::initializer_list<absl::string_view> allowed) const {
    const std::set<absl::string_view> keys(allowed);
    for (const auto& [key, unused] : value_.items()) {
      if (!keys.contains(key)) {
        return FieldError(Child(path_, key),
                          absl::StrCat("unknown key (allowed: ",
                                       absl::StrJoin(allowed, ", "), ")"));
      }
    }
    return absl::OkStatus();
  }

  bool Has(absl::string_view key) const {
    return value_.contains(std::string(key));
  }
  const json& At(absl::string_view key) const {
    return value_.at(std::string(key));
  }
  std::string PathOf(absl::string_view key) const { return Child(path_, key); }

  absl::Status Require(absl::string_view key) const {
    if (!Has(key)) return FieldError(PathOf(key), "required");
    return absl::OkStatus();
  }

  absl::Status Number(absl::string_view key, double& out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    if (!v.is_number()) return FieldError(PathOf(key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) return FieldError(PathOf(key), "must be finite");
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status Integer(absl::string_view key, Int& out, Int min_value) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    if (v.is_number_integer()) {
      const int64_t x = v.get<int64_t>();
      if (x < static_cast<int64_t>(min_value) ||
          x > static_cast<int64_t>(std::numeric_limits<Int>::max())) {
        return FieldError(PathOf(key),
                          absl::StrCat("must be an integer >= ", min_value));
      }
      out = static_cast<Int>(x);
      return absl::OkStatus();
    }
    return FieldError(PathOf(key), "expected an integer");
  }

  absl::Status Seed(absl::string_view key, uint64_t& out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    if (v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<int64_t>() >= 0)) {
      out = v.get<uint64_t>();
      return absl::OkStatus();
    }
    return FieldError(PathOf(key), "expected a nonnegative integer");
  }

  absl::Status String(absl::string_view key, std::string& out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    if (!v.is_string()) return FieldError(PathOf(key), "expected a string");
    out = v.get<std::string>();
    return absl::OkStatus();
  }

  absl::Status NumberArray(absl::string_view key, std::vector<double>& out,
                           bool allow_empty) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    const std::string path = PathOf(key);
    if (!v.is_array()) return FieldError(path, "expected an array of numbers");
    if (!allow_empty && v.empty()) return FieldError(path, "must not be empty");
    std::vector<double> values;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        return FieldError(Index(path, i), "expected a finite number");
      }
      values.push_back(v[i].get<double>());
    }
    out = std::move(values);
    return absl::OkStatus();
  }

  absl::Status Pair(absl::string_view key, std::array<double, 2>& out) const {
    if (!Has(key)) return absl::OkStatus();
    std::vector<double> values;
    if (absl::Status s = NumberArray(key, values, false); !s.ok()) return s;
    if (values.size() != 2) {
      return FieldError(PathOf(key), "expected exactly two numbers");
    }
    out = {values[0], values[1]};
    return absl::OkStatus();
  }

  // Each root is a number or a [re, im] pair.
  absl::Status Roots(absl::string_view key,
                     std::vector<std::complex<double>>& out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    const std::string path = PathOf(key);
    if (!v.is_array()) return FieldError(path, "expected an array of roots");
    std::vector<std::complex<double>> roots;
    for (size_t i = 0; i < v.size(); ++i) {
      const json& r = v[i];
      if (r.is_number()) {
        roots.emplace_back(r.get<double>(), 0.0);
      } else if (r.is_array() && r.size() == 2 && r[0].is_number() &&
                 r[1].is_number()) {
        roots.emplace_back(r[0].get<double>(), r[1].get<double>());
      } else {
        return FieldError(Index(path, i),
                          "expected a number or a [re, im] pair");
      }
    }
    out = std::move(roots);
    return absl::OkStatus();
  }

 private:
  ObjectReader(const json& value, std::string path)
      : value_(value), path_(std::move(path)) {}

  const json& value_;
  std::string path_;
};

#define CONFIG_RETURN_IF_ERROR(expr)     \
  do {                                   \
    const absl::Status status_ = (expr); \
    if (!status_.ok()) return status_;   \
  } while (0)

#define CONFIG_ASSIGN_OR_RETURN(lhs, expr)      \
  auto lhs##_or = (expr);                       \
  if (!lhs##_or.ok()) return lhs##_or.status(); \
  auto lhs = *std::move(lhs##_or)

template <typename Enum>
absl::Status ParseEnum(
    const ObjectReader& reader, absl::string_view key,
    absl::Span<const std::pair<absl::string_view, Enum>> choices, Enum& out) {
  if (!reader.Has(key)) return absl::OkStatus();
  std::string name;
  CONFIG_RETURN_IF_ERROR(reader.String(key, name));
  std::vector<absl::string_view> names;
  for (const auto& [choice, value] : choices) {
    if (choice == name) {
      out = value;
      return absl::OkStatus();
    }
    names.push_back(choice);
  }
  return FieldError(
      reader.PathOf(key),
      absl::StrCat("unknown value \"", name,
                   "\" (expected one of: ", absl::StrJoin(names, ", "), ")"));
}

constexpr std::pair<absl::string_view, SourceKind> kSourceKinds[] = {
    {"markov", SourceKind::kMarkov},
    {"ar", SourceKind::kAr},
    {"iid", SourceKind::kIid}};

constexpr std::pair<absl::string_view, MechanismChoice> kMechanismKinds[] = {
    {"lzf", MechanismChoice::kLzf},
    {"lmmse-noncausal", MechanismChoice::kLmmseNoncausal},
    {"lmmse-causal", MechanismChoice::kLmmseCausal},
    {"df-lmmse-prefilter", MechanismChoice::kDfLmmsePrefilter},
    {"df-optimized-prefilter", MechanismChoice::kDfOptimizedPrefilter},
};

constexpr std::pair<absl::string_view, OutputMode> kOutputModes[] = {
    {"soft", OutputMode::kSoft}, {"hard", OutputMode::kHard}};

constexpr std::pair<absl::string_view, ProfileRealization> kRealizations[] = {
    {"closed-form", ProfileRealization::kClosedForm},
    {"linear", ProfileRealization::kLinear}};

constexpr std::pair<absl::string_view, DecisionDevice::Kind> kDecisionKinds[] =
    {{"sign", DecisionDevice::Kind::kSign},
     {"quantizer", DecisionDevice::Kind::kQuantizer}};

template <typename Enum>
std::string EnumName(
    absl::Span<const std::pair<absl::string_view, Enum>> choices, Enum value) {
  for (const auto& [name, v] : choices) {
    if (v == value) return std::string(name);
  }
  return "";
}

absl::Status ParseFilter(const json& value, ExperimentConfig& config) {
  CONFIG_ASSIGN_OR_RETURN(reader, ObjectReader::Create(value, "filter"));
  CONFIG_RETURN_IF_ERROR(reader.CheckKeys({"numerator", "denominator"}));
  CONFIG_RETURN_IF_ERROR(reader.Require("numerator"));
  CONFIG_RETURN_IF_ERROR(
      reader.NumberArray("numerator", config.numerator, false));
  CONFIG_RETURN_IF_ERROR(
      reader.NumberArray("denominator", config.denominator, false));
  return absl::OkStatus();
}

absl::Status ParsePrivacy(const json& value, ExperimentConfig& config) {
  CONFIG_ASSIGN_OR_RETURN(reader, ObjectReader::Create(value, "privacy"));
  CONFIG_RETURN_IF_ERROR(reader.CheckKeys({"epsilon", "delta", "d"}));
  CONFIG_RETURN_IF_ERROR(reader.Require("epsilon"));
  CONFIG_RETURN_IF_ERROR(reader.Require("delta"));
  CONFIG_RETURN_IF_ERROR(reader.Number("epsilon", config.epsilon));
  CONFIG_RETURN_IF_ERROR(reader.Number("delta", config.delta));
  CONFIG_RETURN_IF_ERROR(reader.Integer("d", config.adjacency, 1));
  if (!(config.epsilon > 0.0)) {
    return FieldError("privacy.epsilon", "must be positive");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    return FieldError("privacy.delta", "must lie in (0, 1)");
  }
  return absl::OkStatus();
}

absl::Status ParseSource(const json& value, SourceConfig& source) {
  CONFIG_ASSIGN_OR_RETURN(reader, ObjectReader::Create(value, "source"));
  CONFIG_RETURN_IF_ERROR(reader.Require("kind"));
  CONFIG_RETURN_IF_ERROR(ParseEnum(
      reader, "kind", absl::MakeConstSpan(kSourceKinds), source.kind));
  CONFIG_RETURN_IF_ERROR(reader.Seed("seed", source.seed));
  switch (source.kind) {
    case SourceKind::kMarkov: {
      CONFIG_RETURN_IF_ERROR(reader.CheckKeys(
          {"kind", "seed", "transition", "values", "initial_state"}));
      if (reader.Has("transition")) {
        const json& t = reader.At("transition");
        const std::string path = reader.PathOf("transition");
        if (!t.is_array() || t.size() != 2) {
          return FieldError(path, "expected a 2x2 array");
        }
        for (size_t i = 0; i < 2; ++i) {
          if (!t[i].is_array() || t[i].size() != 2) {
            return FieldError(Index(path, i), "expected two numbers");
          }
          for (size_t j = 0; j < 2; ++j) {
            if (!t[i][j].is_number()) {
              return FieldError(Index(Index(path, i), j), "expected a number");
            }
            source.transition[i][j] = t[i][j].get<double>();
          }
        }
      }
      CONFIG_RETURN_IF_ERROR(reader.Pair("values", source.values));
      if (reader.Has("initial_state")) {
        int state = 0;
        CONFIG_RETURN_IF_ERROR(reader.Integer("initial_state", state, 0));
        if (state > 1) {
          return FieldError(reader.PathOf("initial_state"), "must be 0 or 1");
        }
        source.initial_state = state;
      }
      break;
    }
    case SourceKind::kAr:
      CONFIG_RETURN_IF_ERROR(reader.CheckKeys(
          {"kind", "seed", "coefficients", "noise_std", "mean"}));
      CONFIG_RETURN_IF_ERROR(
          reader.NumberArray("coefficients", source.coefficients, true));
      CONFIG_RETURN_IF_ERROR(reader.Number("noise_std", source.noise_std));
      CONFIG_RETURN_IF_ERROR(reader.Number("mean", source.mean));
      break;
    case SourceKind::kIid:
      CONFIG_RETURN_IF_ERROR(
          reader.CheckKeys({"kind", "seed", "values", "probability"}));
      CONFIG_RETURN_IF_ERROR(reader.Pair("values", source.values));
      CONFIG_RETURN_IF_ERROR(reader.Number("probability", source.probability));
      break;
  }
  return absl::OkStatus();
}

absl::Status ParsePsd(const json& value, PsdConfig& psd) {
  if (value.is_string()) {
    if (value.get<std::string>() != "from-source") {
      return FieldError("psd", "expected \"from-source\" or an object");
    }
    psd = PsdConfig{};
    return absl::OkStatus();
  }
  CONFIG_ASSIGN_OR_RETURN(reader, ObjectReader::Create(value, "psd"));
  CONFIG_RETURN_IF_ERROR(
      reader.CheckKeys({"gain", "numerator_roots", "denominator_roots"}));
  CONFIG_RETURN_IF_ERROR(reader.Require("gain"));
  psd.from_source = false;
  CONFIG_RETURN_IF_ERROR(reader.Number("gain", psd.gain));
  CONFIG_RETURN_IF_ERROR(reader.Roots("numerator_roots", psd.numerator_roots));
  CONFIG_RETURN_IF_ERROR(
      reader.Roots("denominator_roots", psd.denominator_roots));
  return absl::OkStatus();
}

absl::Status ParseDecision(const json& value, DecisionConfig& decision) {
  CONFIG_ASSIGN_OR_RETURN(reader,
                          ObjectReader::Create(value, "mechanism.decision"));
  CONFIG_RETURN_IF_ERROR(reader.Require("kind"));
  CONFIG_RETURN_IF_ERROR(ParseEnum(
      reader, "kind", absl::MakeConstSpan(kDecisionKinds), decision.kind));
  decision.is_default = false;
  if (decision.kind == DecisionDevice::Kind::kSign) {
    CONFIG_RETURN_IF_ERROR(reader.CheckKeys({"kind", "level"}));
    CONFIG_RETURN_IF_ERROR(reader.Number("level", decision.level));
    if (!(decision.level > 0.0)) {
      return FieldError(reader.PathOf("level"), "must be positive");
    }
  } else {
    CONFIG_RETURN_IF_ERROR(reader.CheckKeys({"kind", "step", "offset"}));
    CONFIG_RETURN_IF_ERROR(reader.Number("step", decision.step));
    CONFIG_RETURN_IF_ERROR(reader.Number("offset", decision.offset));
    if (!(decision.step > 0.0)) {
      return FieldError(reader.PathOf("step"), "must be positive");
    }
  }
  return absl::OkStatus();
}

absl::Status ParseMechanism(const json& value, MechanismConfig& mechanism) {
  CONFIG_ASSIGN_OR_RETURN(reader, ObjectReader::Create(value, "mechanism"));
  CONFIG_RETURN_IF_ERROR(reader.CheckKeys(
      {"kind", "fir_length", "grid_n", "delay", "n_forward", "n_feedback",
       "decision", "output_mode", "wiener_half_length", "profile_floor",
       "profile_realization"}));
  CONFIG_RETURN_IF_ERROR(reader.Require("kind"));
  CONFIG_RETURN_IF_ERROR(ParseEnum(
      reader, "kind", absl::MakeConstSpan(kMechanismKinds), mechanism.kind));
  CONFIG_RETURN_IF_ERROR(reader.Integer("fir_length", mechanism.fir_length, 1));
  CONFIG_RETURN_IF_ERROR(reader.Integer("grid_n", mechanism.grid_n, 16));
  CONFIG_RETURN_IF_ERROR(reader.Integer("delay", mechanism.delay, 0));
  CONFIG_RETURN_IF_ERROR(reader.Integer("n_forward", mechanism.n_forward, 1));
  CONFIG_RETURN_IF_ERROR(reader.Integer("n_feedback", mechanism.n_feedback, 0));
  CONFIG_RETURN_IF_ERROR(
      reader.Integer("wiener_half_length", mechanism.wiener_half_length, 0));
  CONFIG_RETURN_IF_ERROR(
      reader.Number("profile_floor", mechanism.profile_floor));
  if (!(mechanism.profile_floor >= 0.0 && mechanism.profile_floor < 1.0)) {
    return FieldError(reader.PathOf("profile_floor"), "must lie in [0, 1)");
  }
  CONFIG_RETURN_IF_ERROR(ParseEnum(reader, "output_mode",
                                   absl::MakeConstSpan(kOutputModes),
                                   mechanism.output_mode));
  CONFIG_RETURN_IF_ERROR(ParseEnum(reader, "profile_realization",
                                   absl::MakeConstSpan(kRealizations),
                                   mechanism.profile_realization));
  if (reader.Has("decision")) {
    CONFIG_RETURN_IF_ERROR(
        ParseDecision(reader.At("decision"), mechanism.decision));
  }
  return absl::OkStatus();
}

absl::Status ParseRun(const json& value, RunConfig& run) {
  CONFIG_ASSIGN_OR_RETURN(reader, ObjectReader::Create(value, "run"));
  CONFIG_RETURN_IF_ERROR(
      reader.CheckKeys({"T", "replications", "transient", "output_dir",
                        "trace_replications", "trace_samples"}));
  CONFIG_RETURN_IF_ERROR(reader.Integer<int64_t>("T", run.length, 1));
  CONFIG_RETURN_IF_ERROR(reader.Integer("replications", run.replications, 1));
  CONFIG_RETURN_IF_ERROR(
      reader.Integer<int64_t>("transient", run.transient, 0));
  CONFIG_RETURN_IF_ERROR(reader.String("output_dir", run.output_dir));
  CONFIG_RETURN_IF_ERROR(
      reader.Integer("trace_replications", run.trace_replications, -1));
  CONFIG_RETURN_IF_ERROR(
      reader.Integer<int64_t>("trace_samples", run.trace_samples, 0));
  if (run.transient >= run.length) {
    return FieldError(reader.PathOf("transient"), "must be smaller than T");
  }
  return absl::OkStatus();
}

json RootsToJson(const std::vector<std::complex<double>>& roots) {
  json out = json::array();
  for (const auto& r : roots) out.push_back(json::array({r.real(), r.imag()}));
  return out;
}

}  // namespace

absl::string_view MechanismChoiceName(MechanismChoice choice) {
  for (const auto& [name, value] : kMechanismKinds) {
    if (value == choice) return name;
  }
  return "unknown";
}

absl::StatusOr<ExperimentConfig> ParseConfig(const json& value) {
  CONFIG_ASSIGN_OR_RETURN(reader, ObjectReader::Create(value, ""));
  CONFIG_RETURN_IF_ERROR(reader.CheckKeys(
      {"filter", "privacy", "source", "psd", "mechanism", "run"}));
  for (absl::string_view key : {"filter", "privacy", "source", "mechanism"}) {
    CONFIG_RETURN_IF_ERROR(reader.Require(key));
  }
  ExperimentConfig config;
  CONFIG_RETURN_IF_ERROR(ParseFilter(reader.At("filter"), config));
  CONFIG_RETURN_IF_ERROR(ParsePrivacy(reader.At("privacy"), config));
  CONFIG_RETURN_IF_ERROR(ParseSource(reader.At("source"), config.source));
  if (reader.Has("psd")) {
    CONFIG_RETURN_IF_ERROR(ParsePsd(reader.At("psd"), config.psd));
  }
  CONFIG_RETURN_IF_ERROR(
      ParseMechanism(reader.At("mechanism"), config.mechanism));
  if (reader.Has("run")) {
    CONFIG_RETURN_IF_ERROR(ParseRun(reader.At("run"), config.run));
  }
  // Cross-field checks that need the built objects.
  absl::StatusOr<Scenario> scenario = BuildScenario(config);
  if (!scenario.ok()) return scenario.status();
  return config;
}

json ToJson(const ExperimentConfig& config) {
  json source;
  source["kind"] =
      EnumName(absl::MakeConstSpan(kSourceKinds), config.source.kind);
  source["seed"] = config.source.seed;
  switch (config.source.kind) {
    case SourceKind::kMarkov:
      source["transition"] = config.source.transition;
      source["values"] = config.source.values;
      if (config.source.initial_state.has_value()) {
        source["initial_state"] = *config.source.initial_state;
      }
      break;
    case SourceKind::kAr:
      source["coefficients"] = config.source.coefficients;
      source["noise_std"] = config.source.noise_std;
      source["mean"] = config.source.mean;
      break;
    case SourceKind::kIid:
      source["values"] = config.source.values;
      source["probability"] = config.source.probability;
      break;
  }
  json psd = "from-source";
  if (!config.psd.from_source) {
    psd = {{"gain", config.psd.gain},
           {"numerator_roots", RootsToJson(config.psd.numerator_roots)},
           {"denominator_roots", RootsToJson(config.psd.denominator_roots)}};
  }
  const MechanismConfig& m = config.mechanism;
  json mechanism = {
      {"kind", std::string(MechanismChoiceName(m.kind))},
      {"fir_length", m.fir_length},
      {"grid_n", m.grid_n},
      {"delay", m.delay},
      {"n_forward", m.n_forward},
      {"n_feedback", m.n_feedback},
      {"output_mode",
       EnumName(absl::MakeConstSpan(kOutputModes), m.output_mode)},
      {"wiener_half_length", m.wiener_half_length},
      {"profile_floor", m.profile_floor},
      {"profile_realization",
       EnumName(absl::MakeConstSpan(kRealizations), m.profile_realization)},
  };
  if (!m.decision.is_default) {
    json decision = {{"kind", EnumName(absl::MakeConstSpan(kDecisionKinds),
                                       m.decision.kind)}};
    if (m.decision.kind == DecisionDevice::Kind::kSign) {
      decision["level"] = m.decision.level;
    } else {
      decision["step"] = m.decision.step;
      decision["offset"] = m.decision.offset;
    }
    mechanism["decision"] = decision;
  }
  json run = {{"T", config.run.length},
              {"replications", config.run.replications},
              {"transient", config.run.transient},
              {"trace_replications", config.run.trace_replications},
              {"trace_samples", config.run.trace_samples}};
  if (!config.run.output_dir.empty()) run["output_dir"] = config.run.output_dir;
  return {
      {"filter",
       {{"numerator", config.numerator}, {"denominator", config.denominator}}},
      {"privacy",
       {{"epsilon", config.epsilon},
        {"delta", config.delta},
        {"d", config.adjacency}}},
      {"source", source},
      {"psd", psd},
      {"mechanism", mechanism},
      {"run", run},
  };
}

absl::StatusOr<ExperimentConfig> LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return absl::InvalidArgumentError(absl::StrCat(path, ": cannot open"));
  std::stringstream buffer;
  buffer << in.rdbuf();
  json value = json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": not valid JSON"));
  }
  // A manifest carries the resolved configuration under "config".
  if (value.is_object() && value.contains("manifest_version")) {
    if (!value.contains("config")) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": manifest has no config"));
    }
    return ParseConfig(value["config"]);
  }
  return ParseConfig(value);
}

ExperimentConfig ExampleConfig() {
  ExperimentConfig config;
  config.numerator = {1.0, 0.995};
  config.denominator = {1.0, -0.995};
  config.epsilon = std::log(3.0);
  config.delta = 0.05;
  config.adjacency = 1;
  config.source.kind = SourceKind::kMarkov;
  config.source.transition = {{{0.75, 0.25}, {0.25, 0.75}}};
  config.source.values = {-1.0, 1.0};
  config.source.seed = 1;
  config.mechanism.delay = 5;
  return config;
}

absl::StatusOr<Scenario> BuildScenario(const ExperimentConfig& config) {
  absl::StatusOr<RationalTransferFunction> f =
      RationalTransferFunction::Create(config.numerator, config.denominator);
  if (!f.ok()) return Prefixed("filter", f.status());
  if (!f->IsStable()) {
    return FieldError("filter",
                      "denominator has roots on or outside the unit "
                      "circle");
  }
  absl::StatusOr<PrivacyParams> params =
      PrivacyParams::Create(config.epsilon, config.delta, config.adjacency);
  if (!params.ok()) return Prefixed("privacy", params.status());

  std::unique_ptr<SignalSource> source;
  const SourceConfig& s = config.source;
  switch (s.kind) {
    case SourceKind::kMarkov: {
      absl::StatusOr<MarkovSource> markov =
          MarkovSource::Create(s.transition, s.values, s.initial_state);
      if (!markov.ok()) return Prefixed("source", markov.status());
      source = std::make_unique<MarkovSource>(*std::move(markov));
      break;
    }
    case SourceKind::kAr: {
      absl::StatusOr<ArSource> ar =
          ArSource::Create(s.coefficients, s.noise_std, s.mean);
      if (!ar.ok()) return Prefixed("source", ar.status());
      source = std::make_unique<ArSource>(*std::move(ar));
      break;
    }
    case SourceKind::kIid: {
      absl::StatusOr<IidSource> iid =
          IidSource::Create(s.values, s.probability);
      if (!iid.ok()) return Prefixed("source", iid.status());
      source = std::make_unique<IidSource>(*std::move(iid));
      break;
    }
  }

  absl::StatusOr<RationalPsd> psd =
      config.psd.from_source
          ? source->Psd()
          : RationalPsd::Create(config.psd.gain, config.psd.numerator_roots,
                                config.psd.denominator_roots);
  if (!psd.ok()) return Prefixed("psd", psd.status());
  return Scenario{*std::move(f), *std::move(params), std::move(source),
                  *std::move(psd)};
}

DecisionDevice ResolveDecision(const ExperimentConfig& config) {
  const DecisionConfig& d = config.mechanism.decision;
  if (!d.is_default) {
    if (d.kind == DecisionDevice::Kind::kSign) {
      return DecisionDevice::Sign(d.level);
    }
    return *DecisionDevice::Quantizer(d.step, d.offset);
  }
  if (config.source.kind == SourceKind::kAr) {
    return *DecisionDevice::Quantizer(1.0, 0.0);
  }
  const auto& v = config.source.values;
  if (v[0] == -v[1] && v[1] != 0.0) return DecisionDevice::Sign(std::abs(v[1]));
  const double step = std::abs(v[1] - v[0]);
  if (step > 0.0) return *DecisionDevice::Quantizer(step, v[0]);
  return *DecisionDevice::Quantizer(1.0, v[0]);
}

}  // namespace dpfilter::cli
