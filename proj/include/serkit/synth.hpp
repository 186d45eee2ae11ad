#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "serkit/corpus.hpp"
#include "serkit/matrix.hpp"
#include "serkit/trainer.hpp"

namespace serkit {

// Row = true class, column = emitted label; rows sum to 1 within 1e-9.
// coverage is the probability the rater rates any given utterance.
struct RaterProfile {
  std::string rater_id;
  Matrix confusion;
  double coverage = 1.0;
};

// Diagonal `accuracy`, remaining mass spread evenly off-diagonal.
Matrix accuracy_confusion(std::size_t n_classes, double accuracy);

// A `fraction` of utterances get a two-class mixture truth instead of a pure
// class: the pair is drawn uniformly from `pairs` and the first member
// carries `weight`.
struct AmbiguityConfig {
  double fraction = 0.0;
  double weight = 0.5;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Class-conditional spherical Gaussian features. Without explicit means:
// axis-aligned corners separation * e_c when C <= dimension, otherwise
// seeded random unit directions scaled by separation (drawn before any
// utterance).
struct FeatureConfig {
  std::size_t dimension = 8;
  double separation = 2.5;
  double stddev = 1.0;
  std::optional<Matrix> means;  // C x dimension, overrides the above
};

struct SynthConfig {
  std::string name = "synth";
  std::vector<std::string> classes;
  std::size_t n_utterances = 0;
  std::vector<double> prior;  // empty = uniform; else a length-C simplex
  std::vector<RaterProfile> raters;
  std::optional<AmbiguityConfig> ambiguity;
  FeatureConfig features;
  std::uint64_t seed = 0;
  std::size_t n_sessions = 5;
};

SynthConfig synth_config_from_json(const std::string& text);

// Pure truth (class_b empty) or a two-class mixture where class_a carries
// `weight` of the mass.
struct TruthEntry {
  std::string class_a;
  std::string class_b;
  double weight = 1.0;
  bool is_mixture() const { return !class_b.empty(); }
};

using TruthTable = std::map<std::string, TruthEntry>;

std::string truth_to_json(const TruthTable& t);
TruthTable truth_from_json(const std::string& text);

struct SynthResult {
  Corpus corpus;
  FeatureSet features;  // every generated utterance, rated or not
  TruthTable truth;
  std::size_t n_unrated = 0;  // utterances no rater covered; they appear in
                              // features and truth but not in the corpus
};

// One seeded stream drives everything, consumed in a fixed order: feature
// means (only when drawn randomly), then per utterance the truth draw(s),
// the feature noise, and each rater in config order (coverage draw, mixture
// component draw when applicable, confusion emission). Reordering any of
// these would change every byte downstream.
SynthResult generate(const SynthConfig& cfg);

// Law-of-large-numbers convergence checks against the generating config.
// A check whose bound is vacuous (>= the maximum possible deviation) is
// marked skipped instead of trivially passing.
struct EmissionCheck {
  std::string rater_id;
  std::string class_name;  // pure true class of the group
  std::size_t n = 0;       // group size
  double tv = 0.0;         // total variation from the confusion row
  double bound = 0.0;      // 3 / sqrt(n)
  bool skipped = false;
  bool ok = false;
};

struct CoverageCheck {
  std::string rater_id;
  std::size_t rated = 0;
  double expected = 0.0;
  double bound = 0.0;  // 3 * sqrt(n)
  bool skipped = false;
  bool ok = false;
};

struct SynthCheckReport {
  std::vector<EmissionCheck> emissions;
  std::vector<CoverageCheck> coverage;
  double prior_tv = 0.0;  // over pure-truth utterances only
  double prior_bound = 0.0;
  bool prior_skipped = false;
  bool prior_ok = false;
  std::size_t n_mixture = 0;
  bool ok = false;  // every non-skipped check passed
};

SynthCheckReport empirical_check(const SynthResult& result,
                                 const SynthConfig& cfg);

std::string check_report_to_json(const SynthCheckReport& r);

}  // namespace serkit
