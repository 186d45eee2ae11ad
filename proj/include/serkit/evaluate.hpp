#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "serkit/corpus.hpp"
#include "serkit/metrics.hpp"
#include "serkit/trainer.hpp"

namespace serkit {

// What counts as the test set. The donut rules select utterances one rule
// keeps and the stricter rule drops: PRnotMR is kept(PR) \ kept(MR),
// ARnotPR is kept(AR) \ kept(PR).
enum class TestRule { MR, PR, AR, PRnotMR, ARnotPR };

TestRule test_rule_from_string(std::string_view s);  // mr pr ar pr-mr ar-pr
std::string to_string(TestRule r);

// MR, PR and PRnotMR score a single consensus class per utterance; AR and
// ARnotPR score the binarized vote distribution as a label set.
bool is_multilabel(TestRule r);

struct EvalConfig {
  TestRule rule = TestRule::AR;
  // Vote-share cut for multi-label truth and prediction sets. nullopt means
  // 1 / n_classes; ignored by the single-label rules.
  std::optional<double> threshold;
};

struct EvalReport {
  std::string corpus_name;
  TestRule rule = TestRule::AR;
  bool multilabel = false;
  std::string head;             // prediction head the scores came from
  double threshold = 0.0;       // resolved cut, multi-label only
  std::size_t n_test = 0;
  std::size_t n_skipped_no_votes = 0;  // in the test set but nothing to score
  bool empty_test_set = false;

  F1Scores f1;
  std::optional<UarUap> rates;          // single-label rules
  std::optional<MultilabelMetrics> ml;  // multi-label rules
  std::optional<double> kld;            // softmax head only

  // Per-utterance material for significance testing, aligned with ids:
  // item_score is 0/1 correctness for single-label rules and the per-row
  // Hamming distance for multi-label ones; item_kld mirrors `kld`.
  std::vector<std::string> ids;
  std::vector<double> item_score;
  std::vector<double> item_kld;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
};

// Scores a trained model on the utterances the test rule selects. Features
// must cover every selected utterance; extras are ignored.
EvalReport evaluate_model(const ModelParams& params, const Corpus& corpus,
                          const FeatureSet& features, const EvalConfig& cfg);

// Aligned text table, one row per report. Cells a report cannot fill (UAR
// on a multi-label rule, KLD under a sigmoid head) render as "-".
std::string render_eval_table(const std::vector<EvalReport>& reports);

}  // namespace serkit
