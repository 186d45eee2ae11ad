#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "serkit/corpus.hpp"
#include "serkit/losses.hpp"
#include "serkit/matrix.hpp"

namespace serkit {

// One hidden layer, rectified: input d -> hidden h -> output C. Weight
// matrices are row-major with the destination unit as the row.
struct ModelParams {
  std::size_t d_in = 0, d_hidden = 0, n_out = 0;
  Head head = Head::Softmax;
  Matrix w1;                // h x d
  std::vector<double> b1;   // h
  Matrix w2;                // C x h
  std::vector<double> b2;   // C

  bool operator==(const ModelParams&) const = default;
};

struct TrainConfig {
  LossKind loss = LossKind::CE;
  double alpha = 0.0;              // penalty weight
  double beta = 1.0;               // base loss weight
  std::optional<Matrix> penalty;   // C x C, required when alpha != 0
  std::size_t hidden = 16;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  std::size_t patience = 15;       // epochs without dev improvement
  double momentum = 0.0;           // 0 = plain gradient descent
  double dev_fraction = 0.1;       // used when dev_indices is empty
  std::optional<std::vector<std::size_t>> dev_indices;
  std::uint64_t seed = 0;
};

struct EpochStats {
  double train_loss = 0.0;  // mean objective over the training split
  double dev_loss = 0.0;    // over the dev split; equals train_loss when
                            // there is no dev split
};

struct TrainResult {
  ModelParams params;       // parameters at the dev-loss minimum
  std::size_t best_epoch = 0;  // 1-based epoch the minimum was seen
  std::vector<EpochStats> trace;
  std::vector<std::size_t> dev_indices;  // the split actually used
};

// Mean per-sample objective beta * base + alpha * penalized, evaluated at
// fixed parameters. The trace entries are exactly this quantity.
double objective_mean(const ModelParams& p, const Matrix& features,
                      const Matrix& targets, const TrainConfig& cfg);

struct ForwardPass {
  Matrix hidden;  // post-rectifier activations, N x h
  Matrix scores;  // pre-head, N x C
};

ForwardPass forward_pass(const ModelParams& p, const Matrix& features);

// Head-mapped predictions: row-stochastic under the softmax head, entrywise
// (0,1) under the sigmoid head.
Matrix predict(const ModelParams& p, const Matrix& features);

// Deterministic mini-batch gradient descent. Random draws come from a single
// seeded stream in a fixed order: dev split shuffle, then w1 and w2
// initialization (Glorot uniform, row-major), then one batch shuffle per
// epoch. Early stopping tracks dev loss with the configured patience; the
// returned parameters are the ones that minimized it. A non-finite batch
// loss aborts with the offending epoch and batch in the message.
TrainResult train(const Matrix& features, const Matrix& targets,
                  const TrainConfig& cfg);

std::string model_to_json(const ModelParams& p, const TrainConfig& cfg,
                          const TrainResult& result);
ModelParams model_from_json(const std::string& text);
void save_model(const std::string& path, const ModelParams& p,
                const TrainConfig& cfg, const TrainResult& result);
ModelParams load_model(const std::string& path);

// Per-rater ensemble with late fusion. Each rater with at least
// min_rater_samples rated utterances gets a base model trained on its own
// votes, alpha-softened; the rest are reported in skipped. Base weights are
// frozen afterwards. The fusion head is a linear softmax layer over the
// concatenated hidden activations of every base, trained full-batch against
// the supplied targets.
struct EnsembleConfig {
  TrainConfig base;
  double label_alpha = 0.75;       // soften single votes toward uniform
  std::size_t min_rater_samples = 10;
  double fusion_learning_rate = 0.05;
  std::size_t fusion_epochs = 200;
};

struct EnsembleModel {
  std::vector<std::string> rater_ids;  // sorted, skipped raters excluded
  std::vector<ModelParams> bases;      // parallel to rater_ids
  std::vector<std::string> skipped;
  Matrix fusion_w;                     // C x (h * raters)
  std::vector<double> fusion_b;        // C
};

// features rows must align with corpus.utterances() order; fusion_targets
// likewise (one distribution row per utterance).
EnsembleModel train_rater_ensemble(const Corpus& corpus,
                                   const Matrix& features,
                                   const Matrix& fusion_targets,
                                   const EnsembleConfig& cfg);

Matrix ensemble_predict(const EnsembleModel& m, const Matrix& features);

// Feature tables on disk: header `utterance_id,f1,...,fd`, one row per
// utterance.
struct FeatureSet {
  std::vector<std::string> ids;
  Matrix values;
};

FeatureSet load_features(const std::string& path);
void save_features(const std::string& path, const FeatureSet& fs);

// Rows of fs reordered to match corpus.utterances(). Every utterance must be
// present in fs; feature rows for unknown ids are dropped.
Matrix align_features(const Corpus& corpus, const FeatureSet& fs);

}  // namespace serkit
