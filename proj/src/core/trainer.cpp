#include "serkit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <json.hpp>
#include <set>
#include <stdexcept>

#include "serkit/cooccurrence.hpp"
#include "serkit/encodings.hpp"
#include "serkit/errors.hpp"
#include "serkit/io.hpp"
#include "serkit/rng.hpp"

namespace serkit {

namespace {

using nlohmann::json;

void require_finite(const Matrix& m, const char* what) {
  for (double v : m.data())
    if (!std::isfinite(v))
      throw InputError(std::string(what) + " contains a non-finite value");
}

void glorot_fill(Matrix& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.data()) v = (2.0 * rng.uniform() - 1.0) * limit;
}

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out.at(i, j) = m.at(idx[i], j);
  return out;
}

const Matrix* penalty_of(const TrainConfig& cfg) {
  return cfg.penalty ? &*cfg.penalty : nullptr;
}

void validate_config(const TrainConfig& cfg, std::size_t n_out) {
  if (cfg.epochs < 1) throw InputError("train: epochs must be at least 1");
  if (!(cfg.learning_rate > 0.0))
    throw InputError("train: learning rate must be positive");
  if (cfg.batch_size < 1) throw InputError("train: batch size must be at least 1");
  if (cfg.hidden < 1) throw InputError("train: hidden width must be at least 1");
  if (cfg.alpha != 0.0 && !cfg.penalty)
    throw InputError("train: alpha is nonzero but no penalty matrix is set");
  if (cfg.penalty &&
      (cfg.penalty->rows() != n_out || cfg.penalty->cols() != n_out))
    throw InputError("train: penalty matrix shape does not match the " +
                     std::to_string(n_out) + " output classes");
  if (cfg.alpha == 0.0 && cfg.beta == 0.0)
    throw InputError("train: objective is identically zero (alpha and beta both 0)");
}

}  // namespace

ForwardPass forward_pass(const ModelParams& p, const Matrix& features) {
  if (features.cols() != p.d_in)
    throw InputError("feature width " + std::to_string(features.cols()) +
                     " does not match the model input width " +
                     std::to_string(p.d_in));
  std::size_t n = features.rows();
  ForwardPass out{Matrix(n, p.d_hidden), Matrix(n, p.n_out)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p.d_hidden; ++j) {
      double acc = p.b1[j];
      for (std::size_t d = 0; d < p.d_in; ++d)
        acc += p.w1.at(j, d) * features.at(i, d);
      out.hidden.at(i, j) = acc > 0.0 ? acc : 0.0;
    }
    for (std::size_t k = 0; k < p.n_out; ++k) {
      double acc = p.b2[k];
      for (std::size_t j = 0; j < p.d_hidden; ++j)
        acc += p.w2.at(k, j) * out.hidden.at(i, j);
      out.scores.at(i, k) = acc;
    }
  }
  return out;
}

Matrix predict(const ModelParams& p, const Matrix& features) {
  return apply_head(forward_pass(p, features).scores, p.head);
}

double objective_mean(const ModelParams& p, const Matrix& features,
                      const Matrix& targets, const TrainConfig& cfg) {
  if (features.rows() == 0) throw InputError("objective over an empty set");
  Matrix yp = predict(p, features);
  Matrix L = elementwise_loss(targets, yp, cfg.loss);
  double base = sum_loss(L);
  double pen = cfg.penalty ? penalized_loss(L, *cfg.penalty) : 0.0;
  return total_loss(base, pen, cfg.alpha, cfg.beta) /
         static_cast<double>(features.rows());
}

namespace {

struct Gradients {
  Matrix w1, w2;
  std::vector<double> b1, b2;
};

// Mean-over-batch gradients for every parameter, driven by the loss
// module's score gradient so the penalty weighting stays in one place.
Gradients backward(const ModelParams& p, const Matrix& X, const Matrix& T,
                   const ForwardPass& f, const TrainConfig& cfg) {
  std::size_t n = X.rows();
  Matrix g = loss_gradient(T, f.scores, cfg.loss, penalty_of(cfg), cfg.alpha,
                           cfg.beta);
  double inv_n = 1.0 / static_cast<double>(n);

  Gradients out{Matrix(p.d_hidden, p.d_in), Matrix(p.n_out, p.d_hidden),
                std::vector<double>(p.d_hidden, 0.0),
                std::vector<double>(p.n_out, 0.0)};
  Matrix dh(n, p.d_hidden, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < p.n_out; ++k) {
      double gv = g.at(i, k);
      out.b2[k] += gv * inv_n;
      for (std::size_t j = 0; j < p.d_hidden; ++j) {
        out.w2.at(k, j) += gv * f.hidden.at(i, j) * inv_n;
        dh.at(i, j) += gv * p.w2.at(k, j);
      }
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p.d_hidden; ++j) {
      if (f.hidden.at(i, j) <= 0.0) continue;  // rectifier gate
      double dv = dh.at(i, j);
      out.b1[j] += dv * inv_n;
      for (std::size_t d = 0; d < p.d_in; ++d)
        out.w1.at(j, d) += dv * X.at(i, d) * inv_n;
    }
  return out;
}

}  // namespace

TrainResult train(const Matrix& features, const Matrix& targets,
                  const TrainConfig& cfg) {
  if (features.rows() != targets.rows())
    throw InputError("train: " + std::to_string(features.rows()) +
                     " feature rows vs " + std::to_string(targets.rows()) +
                     " target rows");
  if (features.rows() == 0) throw InputError("train: no samples");
  require_finite(features, "train: features");
  require_finite(targets, "train: targets");
  validate_config(cfg, targets.cols());

  std::size_t N = features.rows();
  Rng rng(cfg.seed);

  // Dev split first, then weight init, then per-epoch shuffles; the order is
  // part of the determinism contract.
  std::vector<std::size_t> dev_idx;
  if (cfg.dev_indices) {
    dev_idx = *cfg.dev_indices;
    for (std::size_t i : dev_idx)
      if (i >= N)
        throw InputError("train: dev index " + std::to_string(i) +
                         " out of range");
  } else {
    std::vector<std::size_t> order(N);
    for (std::size_t i = 0; i < N; ++i) order[i] = i;
    rng.shuffle(order);
    std::size_t dev_n =
        static_cast<std::size_t>(cfg.dev_fraction * static_cast<double>(N) + 1e-9);
    dev_idx.assign(order.begin(), order.begin() + dev_n);
    std::sort(dev_idx.begin(), dev_idx.end());
  }
  std::set<std::size_t> dev_set(dev_idx.begin(), dev_idx.end());
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < N; ++i)
    if (!dev_set.count(i)) train_idx.push_back(i);
  if (train_idx.empty()) throw InputError("train: dev split consumed every sample");

  ModelParams p;
  p.d_in = features.cols();
  p.d_hidden = cfg.hidden;
  p.n_out = targets.cols();
  p.head = head_for(cfg.loss);
  p.w1 = Matrix(p.d_hidden, p.d_in);
  p.b1.assign(p.d_hidden, 0.0);
  p.w2 = Matrix(p.n_out, p.d_hidden);
  p.b2.assign(p.n_out, 0.0);
  glorot_fill(p.w1, p.d_in, p.d_hidden, rng);
  glorot_fill(p.w2, p.d_hidden, p.n_out, rng);

  Matrix Xtr = take_rows(features, train_idx);
  Matrix Ttr = take_rows(targets, train_idx);
  Matrix Xdev = take_rows(features, dev_idx);
  Matrix Tdev = take_rows(targets, dev_idx);

  Gradients vel{Matrix(p.d_hidden, p.d_in, 0.0), Matrix(p.n_out, p.d_hidden, 0.0),
                std::vector<double>(p.d_hidden, 0.0),
                std::vector<double>(p.n_out, 0.0)};
  auto step = [&](Matrix& w, Matrix& v, const Matrix& g) {
    for (std::size_t i = 0; i < w.data().size(); ++i) {
      v.data()[i] = cfg.momentum * v.data()[i] - cfg.learning_rate * g.data()[i];
      w.data()[i] += v.data()[i];
    }
  };
  auto step_vec = [&](std::vector<double>& w, std::vector<double>& v,
                      const std::vector<double>& g) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = cfg.momentum * v[i] - cfg.learning_rate * g[i];
      w[i] += v[i];
    }
  };

  TrainResult result;
  result.dev_indices = dev_idx;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train_idx.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      ++batch_no;
      std::size_t len = std::min(cfg.batch_size, order.size() - start);
      std::vector<std::size_t> batch(order.begin() + start,
                                     order.begin() + start + len);
      Matrix Xb = take_rows(Xtr, batch);
      Matrix Tb = take_rows(Ttr, batch);
      ForwardPass f = forward_pass(p, Xb);
      Matrix yp = apply_head(f.scores, p.head);
      Matrix L = elementwise_loss(Tb, yp, cfg.loss);
      double batch_loss =
          total_loss(sum_loss(L), cfg.penalty ? penalized_loss(L, *cfg.penalty) : 0.0,
                     cfg.alpha, cfg.beta) /
          static_cast<double>(len);
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("non-finite training loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch_no));
      Gradients g = backward(p, Xb, Tb, f, cfg);
      step(p.w1, vel.w1, g.w1);
      step(p.w2, vel.w2, g.w2);
      step_vec(p.b1, vel.b1, g.b1);
      step_vec(p.b2, vel.b2, g.b2);
    }

    EpochStats stats;
    stats.train_loss = objective_mean(p, Xtr, Ttr, cfg);
    stats.dev_loss =
        dev_idx.empty() ? stats.train_loss : objective_mean(p, Xdev, Tdev, cfg);
    result.trace.push_back(stats);

    if (stats.dev_loss < best) {
      best = stats.dev_loss;
      result.params = p;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

namespace {

json config_json(const TrainConfig& cfg) {
  json j{{"loss", to_string(cfg.loss)},
         {"alpha", cfg.alpha},
         {"beta", cfg.beta},
         {"hidden", cfg.hidden},
         {"learning_rate", cfg.learning_rate},
         {"batch_size", cfg.batch_size},
         {"epochs", cfg.epochs},
         {"patience", cfg.patience},
         {"momentum", cfg.momentum},
         {"dev_fraction", cfg.dev_fraction},
         {"seed", cfg.seed}};
  if (cfg.penalty) {
    j["penalty"] = {{"rows", cfg.penalty->rows()},
                    {"cols", cfg.penalty->cols()},
                    {"data", cfg.penalty->data()}};
  }
  return j;
}

}  // namespace

std::string model_to_json(const ModelParams& p, const TrainConfig& cfg,
                          const TrainResult& result) {
  json trace_train = json::array(), trace_dev = json::array();
  for (const EpochStats& e : result.trace) {
    trace_train.push_back(e.train_loss);
    trace_dev.push_back(e.dev_loss);
  }
  json j{{"format", "serkit-model"},
         {"version", 1},
         {"d_in", p.d_in},
         {"d_hidden", p.d_hidden},
         {"n_out", p.n_out},
         {"head", p.head == Head::Softmax ? "softmax" : "sigmoid"},
         {"w1", p.w1.data()},
         {"b1", p.b1},
         {"w2", p.w2.data()},
         {"b2", p.b2},
         {"config", config_json(cfg)},
         {"best_epoch", result.best_epoch},
         {"trace", {{"train", trace_train}, {"dev", trace_dev}}}};
  return j.dump(2) + "\n";
}

ModelParams model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "serkit-model")
      throw InputError("not a model file (format field mismatch)");
    ModelParams p;
    p.d_in = j.at("d_in").get<std::size_t>();
    p.d_hidden = j.at("d_hidden").get<std::size_t>();
    p.n_out = j.at("n_out").get<std::size_t>();
    std::string head = j.at("head").get<std::string>();
    if (head == "softmax")
      p.head = Head::Softmax;
    else if (head == "sigmoid")
      p.head = Head::Sigmoid;
    else
      throw InputError("unknown head '" + head + "'");
    p.w1 = Matrix(p.d_hidden, p.d_in, j.at("w1").get<std::vector<double>>());
    p.b1 = j.at("b1").get<std::vector<double>>();
    p.w2 = Matrix(p.n_out, p.d_hidden, j.at("w2").get<std::vector<double>>());
    p.b2 = j.at("b2").get<std::vector<double>>();
    if (p.b1.size() != p.d_hidden || p.b2.size() != p.n_out)
      throw InputError("model bias lengths do not match the declared shapes");
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("model file is missing fields: ") + e.what());
  }
}

void save_model(const std::string& path, const ModelParams& p,
                const TrainConfig& cfg, const TrainResult& result) {
  write_file_atomic(path, model_to_json(p, cfg, result));
}

ModelParams load_model(const std::string& path) {
  return model_from_json(read_file(path));
}

namespace {

// A rater's vote softened toward uniform; single votes at alpha = 0 would be
// one-hot.
Matrix rater_targets(const Corpus& view, double alpha) {
  const auto& utts = view.utterances();
  std::size_t C = view.classes().size();
  Matrix out(utts.size(), C);
  for (std::size_t i = 0; i < utts.size(); ++i) {
    VoteCount vc = vote_counts(utts[i], view.classes());
    if (vc.total_in_set == 0)
      throw InputError("rater vote on '" + utts[i].id +
                       "' is outside the class set");
    LabelVector lv = alpha_soft(vc, alpha);
    for (std::size_t j = 0; j < C; ++j) out.at(i, j) = lv.values[j];
  }
  return out;
}

Matrix concat_hidden(const std::vector<ModelParams>& bases, const Matrix& X) {
  std::size_t width = 0;
  for (const auto& b : bases) width += b.d_hidden;
  Matrix z(X.rows(), width);
  std::size_t off = 0;
  for (const auto& b : bases) {
    Matrix h = forward_pass(b, X).hidden;
    for (std::size_t i = 0; i < X.rows(); ++i)
      for (std::size_t j = 0; j < b.d_hidden; ++j)
        z.at(i, off + j) = h.at(i, j);
    off += b.d_hidden;
  }
  return z;
}

}  // namespace

EnsembleModel train_rater_ensemble(const Corpus& corpus, const Matrix& features,
                                   const Matrix& fusion_targets,
                                   const EnsembleConfig& cfg) {
  const auto& utts = corpus.utterances();
  if (features.rows() != utts.size())
    throw InputError("ensemble: feature rows do not match corpus utterances");
  if (fusion_targets.rows() != utts.size() ||
      fusion_targets.cols() != corpus.classes().size())
    throw InputError("ensemble: fusion target shape does not match the corpus");

  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < utts.size(); ++i) row_of[utts[i].id] = i;

  EnsembleModel model;
  for (const std::string& rid : rater_ids(corpus)) {
    Corpus view = rater_view(corpus, rid);
    if (view.utterances().size() < cfg.min_rater_samples) {
      model.skipped.push_back(rid);
      continue;
    }
    std::vector<std::size_t> rows;
    for (const auto& u : view.utterances()) rows.push_back(row_of.at(u.id));
    TrainConfig base_cfg = cfg.base;
    base_cfg.seed = cfg.base.seed ^ fnv1a64(rid);
    TrainResult r =
        train(take_rows(features, rows), rater_targets(view, cfg.label_alpha),
              base_cfg);
    model.rater_ids.push_back(rid);
    model.bases.push_back(std::move(r.params));
  }
  if (model.bases.empty())
    throw InputError("ensemble: no rater meets the minimum of " +
                     std::to_string(cfg.min_rater_samples) + " rated utterances");

  // Late fusion: linear softmax over concatenated penultimate activations,
  // full-batch descent, bases untouched.
  Matrix z = concat_hidden(model.bases, features);
  std::size_t C = corpus.classes().size();
  model.fusion_w = Matrix(C, z.cols());
  model.fusion_b.assign(C, 0.0);
  Rng rng(cfg.base.seed ^ fnv1a64("fusion"));
  glorot_fill(model.fusion_w, z.cols(), C, rng);

  for (std::size_t epoch = 1; epoch <= cfg.fusion_epochs; ++epoch) {
    Matrix scores(z.rows(), C);
    for (std::size_t i = 0; i < z.rows(); ++i)
      for (std::size_t k = 0; k < C; ++k) {
        double acc = model.fusion_b[k];
        for (std::size_t j = 0; j < z.cols(); ++j)
          acc += model.fusion_w.at(k, j) * z.at(i, j);
        scores.at(i, k) = acc;
      }
    Matrix g = loss_gradient(fusion_targets, scores, LossKind::CE, nullptr,
                             0.0, 1.0);
    double inv_n = 1.0 / static_cast<double>(z.rows());
    for (std::size_t i = 0; i < z.rows(); ++i)
      for (std::size_t k = 0; k < C; ++k) {
        double gv = g.at(i, k) * inv_n;
        model.fusion_b[k] -= cfg.fusion_learning_rate * gv;
        for (std::size_t j = 0; j < z.cols(); ++j)
          model.fusion_w.at(k, j) -=
              cfg.fusion_learning_rate * gv * z.at(i, j);
      }
  }
  return model;
}

Matrix ensemble_predict(const EnsembleModel& m, const Matrix& features) {
  Matrix z = concat_hidden(m.bases, features);
  std::size_t C = m.fusion_b.size();
  Matrix scores(z.rows(), C);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t k = 0; k < C; ++k) {
      double acc = m.fusion_b[k];
      for (std::size_t j = 0; j < z.cols(); ++j)
        acc += m.fusion_w.at(k, j) * z.at(i, j);
      scores.at(i, k) = acc;
    }
  return apply_head(scores, Head::Softmax);
}

FeatureSet load_features(const std::string& path) {
  ValueTable t = read_value_table(path);
  return FeatureSet{std::move(t.ids), std::move(t.values)};
}

void save_features(const std::string& path, const FeatureSet& fs) {
  ValueTable t;
  t.ids = fs.ids;
  for (std::size_t j = 0; j < fs.values.cols(); ++j)
    t.columns.push_back("f" + std::to_string(j + 1));
  t.values = fs.values;
  write_file_atomic(path, value_table_to_csv(t));
}

Matrix align_features(const Corpus& corpus, const FeatureSet& fs) {
  if (fs.ids.size() != fs.values.rows())
    throw InputError("feature table ids and rows disagree");
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < fs.ids.size(); ++i) {
    if (!row_of.emplace(fs.ids[i], i).second)
      throw InputError("duplicate feature row for utterance '" + fs.ids[i] + "'");
  }
  Matrix out(corpus.utterances().size(), fs.values.cols());
  for (std::size_t i = 0; i < corpus.utterances().size(); ++i) {
    auto it = row_of.find(corpus.utterances()[i].id);
    if (it == row_of.end())
      throw InputError("no feature row for utterance '" +
                       corpus.utterances()[i].id + "'");
    for (std::size_t j = 0; j < fs.values.cols(); ++j)
      out.at(i, j) = fs.values.at(it->second, j);
  }
  return out;
}

}  // namespace serkit
