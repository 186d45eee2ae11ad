#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "serkit/cooccurrence.hpp"
#include "serkit/corpus.hpp"
#include "serkit/matrix.hpp"

namespace serkit {

// Entry 1 iff prediction strictly exceeds the threshold, so a uniform row at
// threshold 1/C binarizes to all zeros. Threshold must lie in (0, 1).
Matrix binarize(const Matrix& yp, double threshold);

// Index of the row maximum; the lowest index wins ties.
std::vector<int> argmax_indices(const Matrix& m);

// One-hot rows from class indices.
Matrix onehot_rows(const std::vector<int>& indices, std::size_t n_classes);

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
  double weighted = 0.0;
};

// Per-class precision/recall/F1 over binary matrices with 0/0 defined as 0.
// macro: unweighted class mean; micro: global confusion counts; weighted:
// support-weighted class mean.
F1Scores f1_scores(const Matrix& truth_bin, const Matrix& pred_bin);

struct UarUap {
  double uar = 0.0;
  double uap = 0.0;
};

// Unweighted average recall/precision over all n_classes classes, including
// classes absent from both vectors (they contribute 0).
UarUap uar_uap(const std::vector<int>& truth, const std::vector<int>& pred,
               std::size_t n_classes);

// Per-sample KL divergence target || prediction. Every row of both matrices
// must be a probability vector within 1e-6; zero-handling and the clamp floor
// follow the loss kernel.
std::vector<double> kld_per_sample(const Matrix& truth_dist, const Matrix& yp);
double kld_eval(const Matrix& truth_dist, const Matrix& yp);

struct MultilabelMetrics {
  double hamming = 0.0;       // entrywise disagreement after 0.5-binarization
  double ranking_loss = 0.0;  // wrongly ordered (relevant, irrelevant) pairs
  double coverage = 0.0;      // 1-based rank depth covering all relevant labels
  std::size_t skipped_rows = 0;  // all-zero truth rows, excluded from
                                 // ranking_loss and coverage
};

// Ties in yp count against ranking_loss and deepen coverage. Rows whose
// relevant set is everything contribute 0 pairs and full depth.
MultilabelMetrics multilabel_metrics(const Matrix& truth_bin, const Matrix& yp);

struct Projection {
  Matrix values;     // mapped columns, copied without renormalization
  Matrix binarized;  // values thresholded at 1/source_classes
};

// mapping[t] is the source column feeding target class t; indices must be
// distinct and valid for a prediction matrix over source_classes classes.
Projection project_predictions(const Matrix& yp,
                               const std::vector<std::size_t>& mapping,
                               std::size_t source_classes);

// Each prediction row's 1-set counted as an utterance's chosen class set.
inline CoCountMatrix predicted_cooccurrence(const Matrix& pred_bin) {
  return co_counts_from_binary(pred_bin);
}

// Fraction of rater pairs naming the same class; fewer than two ratings
// scores 0.
double pairwise_agreement(const Utterance& u);

struct AgreementGroups {
  std::vector<std::string> high;  // ids, sorted
  std::vector<std::string> low;
};

// Ranks utterances by pairwise agreement and returns the top and bottom
// floor(fraction * N) ids. Ties in the ranking break by utterance id, so the
// split is deterministic. Requires 0 < fraction < 0.5.
AgreementGroups agreement_split(const Corpus& c, double fraction);

struct TTestResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  std::vector<double> fold_means_a;  // empty for a plain two-sample test
  std::vector<double> fold_means_b;
};

// Welch's unequal-variance two-tailed t-test. Both samples need >= 2 values.
// Degenerate case of zero variance on both sides: p = 1 when the means agree
// exactly, else p = 0.
TTestResult welch_ttest(const std::vector<double>& a,
                        const std::vector<double>& b);

// Splits paired per-item vectors into n_folds seeded random folds of
// near-equal size, then runs welch_ttest on the two sets of per-fold means.
// Items stay paired: fold assignment is shared between a and b.
TTestResult fold_split_ttest(const std::vector<double>& a,
                             const std::vector<double>& b,
                             std::size_t n_folds, std::uint64_t seed);

// Mean silhouette score under Euclidean distance. Points in singleton
// clusters score 0. Requires at least two distinct labels.
double silhouette(const Matrix& points, const std::vector<int>& labels);

}  // namespace serkit
