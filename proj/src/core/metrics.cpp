#include "serkit/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "serkit/errors.hpp"
#include "serkit/losses.hpp"
#include "serkit/rng.hpp"

namespace serkit {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b))
    throw InputError(std::string(what) + ": shape mismatch, " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
}

void require_binary(const Matrix& m, const char* what) {
  for (double v : m.data())
    if (v != 0.0 && v != 1.0)
      throw InputError(std::string(what) + ": matrix entries must be 0 or 1");
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_from(double precision, double recall) {
  double s = precision + recall;
  return s == 0.0 ? 0.0 : 2.0 * precision * recall / s;
}

}  // namespace

Matrix binarize(const Matrix& yp, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InputError("binarize: threshold must lie in (0, 1), got " +
                     std::to_string(threshold));
  Matrix out(yp.rows(), yp.cols());
  for (std::size_t i = 0; i < yp.data().size(); ++i)
    out.data()[i] = yp.data()[i] > threshold ? 1.0 : 0.0;
  return out;
}

std::vector<int> argmax_indices(const Matrix& m) {
  if (m.cols() == 0) throw InputError("argmax over a zero-column matrix");
  std::vector<int> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < m.cols(); ++j)
      if (m.at(i, j) > m.at(i, best)) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

Matrix onehot_rows(const std::vector<int>& indices, std::size_t n_classes) {
  Matrix out(indices.size(), n_classes, 0.0);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || static_cast<std::size_t>(indices[i]) >= n_classes)
      throw InputError("class index " + std::to_string(indices[i]) +
                       " out of range for " + std::to_string(n_classes) +
                       " classes");
    out.at(i, static_cast<std::size_t>(indices[i])) = 1.0;
  }
  return out;
}

F1Scores f1_scores(const Matrix& truth_bin, const Matrix& pred_bin) {
  require_same_shape(truth_bin, pred_bin, "f1_scores");
  require_binary(truth_bin, "f1_scores truth");
  require_binary(pred_bin, "f1_scores predictions");

  std::size_t C = truth_bin.cols();
  std::vector<double> tp(C, 0), fp(C, 0), fn(C, 0);
  for (std::size_t i = 0; i < truth_bin.rows(); ++i)
    for (std::size_t j = 0; j < C; ++j) {
      bool t = truth_bin.at(i, j) == 1.0, p = pred_bin.at(i, j) == 1.0;
      if (t && p) tp[j] += 1;
      else if (!t && p) fp[j] += 1;
      else if (t && !p) fn[j] += 1;
    }

  F1Scores out;
  double support_total = 0.0, weighted_acc = 0.0;
  double gtp = 0.0, gfp = 0.0, gfn = 0.0;
  for (std::size_t j = 0; j < C; ++j) {
    double f1 = f1_from(safe_ratio(tp[j], tp[j] + fp[j]),
                        safe_ratio(tp[j], tp[j] + fn[j]));
    out.macro += f1;
    double support = tp[j] + fn[j];
    weighted_acc += support * f1;
    support_total += support;
    gtp += tp[j];
    gfp += fp[j];
    gfn += fn[j];
  }
  out.macro /= static_cast<double>(C);
  out.weighted = safe_ratio(weighted_acc, support_total);
  out.micro = f1_from(safe_ratio(gtp, gtp + gfp), safe_ratio(gtp, gtp + gfn));
  return out;
}

UarUap uar_uap(const std::vector<int>& truth, const std::vector<int>& pred,
               std::size_t n_classes) {
  if (truth.size() != pred.size())
    throw InputError("uar_uap: truth and prediction lengths differ");
  std::vector<double> correct(n_classes, 0), truth_n(n_classes, 0),
      pred_n(n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    int t = truth[i], p = pred[i];
    if (t < 0 || static_cast<std::size_t>(t) >= n_classes || p < 0 ||
        static_cast<std::size_t>(p) >= n_classes)
      throw InputError("uar_uap: class index out of range at sample " +
                       std::to_string(i));
    truth_n[t] += 1;
    pred_n[p] += 1;
    if (t == p) correct[t] += 1;
  }
  UarUap out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    out.uar += safe_ratio(correct[c], truth_n[c]);
    out.uap += safe_ratio(correct[c], pred_n[c]);
  }
  out.uar /= static_cast<double>(n_classes);
  out.uap /= static_cast<double>(n_classes);
  return out;
}

namespace {

void require_simplex_rows(const Matrix& m, const char* what) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double v = m.at(i, j);
      if (!std::isfinite(v) || v < -1e-6 || v > 1.0 + 1e-6)
        throw InputError(std::string(what) + ": row " + std::to_string(i) +
                         " is not a probability vector");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw InputError(std::string(what) + ": row " + std::to_string(i) +
                       " sums to " + std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

std::vector<double> kld_per_sample(const Matrix& truth_dist, const Matrix& yp) {
  require_same_shape(truth_dist, yp, "kld_eval");
  require_simplex_rows(truth_dist, "kld_eval truth");
  require_simplex_rows(yp, "kld_eval predictions");
  // Negative dust within the simplex tolerance would trip the loss kernel's
  // target validation; clip it away first.
  Matrix t = truth_dist;
  for (double& v : t.data()) v = std::clamp(v, 0.0, 1.0);
  Matrix terms = elementwise_loss(t, yp, LossKind::KLD);
  std::vector<double> out(terms.rows());
  for (std::size_t i = 0; i < terms.rows(); ++i)
    out[i] = pairwise_sum(terms.row(i));
  return out;
}

double kld_eval(const Matrix& truth_dist, const Matrix& yp) {
  std::vector<double> per = kld_per_sample(truth_dist, yp);
  if (per.empty()) throw InputError("kld_eval: no samples");
  return pairwise_sum(per) / static_cast<double>(per.size());
}

MultilabelMetrics multilabel_metrics(const Matrix& truth_bin, const Matrix& yp) {
  require_same_shape(truth_bin, yp, "multilabel_metrics");
  require_binary(truth_bin, "multilabel_metrics truth");
  for (double v : yp.data())
    if (!std::isfinite(v))
      throw InputError("multilabel_metrics: non-finite prediction");

  std::size_t N = truth_bin.rows(), C = truth_bin.cols();
  if (N == 0 || C == 0) throw InputError("multilabel_metrics: empty input");

  MultilabelMetrics out;
  Matrix ypb = binarize(yp, 0.5);
  double disagree = 0.0;
  for (std::size_t i = 0; i < N * C; ++i)
    if (truth_bin.data()[i] != ypb.data()[i]) disagree += 1.0;
  out.hamming = disagree / static_cast<double>(N * C);

  double rank_acc = 0.0, cover_acc = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<std::size_t> rel, irr;
    for (std::size_t j = 0; j < C; ++j)
      (truth_bin.at(i, j) == 1.0 ? rel : irr).push_back(j);
    if (rel.empty()) {
      ++out.skipped_rows;
      continue;
    }
    ++used;

    // Pairs (relevant, irrelevant) the predictor fails to order strictly.
    double wrong = 0.0;
    for (std::size_t r : rel)
      for (std::size_t z : irr)
        if (yp.at(i, r) <= yp.at(i, z)) wrong += 1.0;
    if (!irr.empty())
      rank_acc += wrong / static_cast<double>(rel.size() * irr.size());

    // Depth of the worst-ranked relevant label; ties deepen the rank.
    double worst = 0.0;
    for (std::size_t r : rel) {
      double rank = 0.0;
      for (std::size_t j = 0; j < C; ++j)
        if (yp.at(i, j) >= yp.at(i, r)) rank += 1.0;
      worst = std::max(worst, rank);
    }
    cover_acc += worst;
  }
  if (used > 0) {
    out.ranking_loss = rank_acc / static_cast<double>(used);
    out.coverage = cover_acc / static_cast<double>(used);
  }
  return out;
}

Projection project_predictions(const Matrix& yp,
                               const std::vector<std::size_t>& mapping,
                               std::size_t source_classes) {
  if (mapping.empty()) throw InputError("project_predictions: empty mapping");
  if (yp.cols() != source_classes)
    throw InputError("project_predictions: matrix has " +
                     std::to_string(yp.cols()) + " columns, expected " +
                     std::to_string(source_classes));
  std::vector<bool> seen(source_classes, false);
  for (std::size_t s : mapping) {
    if (s >= source_classes)
      throw InputError("project_predictions: source index " +
                       std::to_string(s) + " out of range");
    if (seen[s])
      throw InputError("project_predictions: source index " +
                       std::to_string(s) + " mapped twice");
    seen[s] = true;
  }

  Projection out{Matrix(yp.rows(), mapping.size()),
                 Matrix(yp.rows(), mapping.size())};
  for (std::size_t i = 0; i < yp.rows(); ++i)
    for (std::size_t t = 0; t < mapping.size(); ++t)
      out.values.at(i, t) = yp.at(i, mapping[t]);
  out.binarized = binarize(out.values, 1.0 / static_cast<double>(source_classes));
  return out;
}

double pairwise_agreement(const Utterance& u) {
  std::size_t k = u.ratings.size();
  if (k < 2) return 0.0;
  double agree = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (u.ratings[i].class_name == u.ratings[j].class_name) agree += 1.0;
  return agree / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

AgreementGroups agreement_split(const Corpus& c, double fraction) {
  if (!(fraction > 0.0 && fraction < 0.5))
    throw InputError("agreement_split: fraction must lie in (0, 0.5), got " +
                     std::to_string(fraction));
  struct Scored {
    double score;
    const std::string* id;
  };
  std::vector<Scored> scored;
  scored.reserve(c.utterances().size());
  for (const auto& u : c.utterances())
    scored.push_back({pairwise_agreement(u), &u.id});

  std::size_t n = static_cast<std::size_t>(
      fraction * static_cast<double>(scored.size()) + 1e-9);
  AgreementGroups out;
  auto take = [&](bool high) {
    std::vector<Scored> v = scored;
    std::sort(v.begin(), v.end(), [&](const Scored& a, const Scored& b) {
      if (a.score != b.score) return high ? a.score > b.score : a.score < b.score;
      return *a.id < *b.id;
    });
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(*v[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  out.high = take(true);
  out.low = take(false);
  return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
  std::vector<double> sq;
  sq.reserve(v.size());
  for (double x : v) sq.push_back((x - mean) * (x - mean));
  return pairwise_sum(sq) / static_cast<double>(v.size() - 1);
}

}  // namespace

TTestResult welch_ttest(const std::vector<double>& a,
                        const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw InputError("welch_ttest: each sample needs at least 2 values");
  TTestResult out;
  out.mean_a = mean_of(a);
  out.mean_b = mean_of(b);
  double va = sample_variance(a, out.mean_a);
  double vb = sample_variance(b, out.mean_b);
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double se2 = va / na + vb / nb;
  if (se2 == 0.0) {
    // No spread on either side: identical means are certain agreement,
    // different means certain disagreement.
    if (out.mean_a == out.mean_b) {
      out.t = 0.0;
      out.p = 1.0;
    } else {
      out.t = out.mean_a > out.mean_b ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
      out.p = 0.0;
    }
    return out;
  }
  out.t = (out.mean_a - out.mean_b) / std::sqrt(se2);
  out.df = se2 * se2 / ((va / na) * (va / na) / (na - 1.0) +
                        (vb / nb) * (vb / nb) / (nb - 1.0));
  boost::math::students_t dist(out.df);
  out.p = 2.0 * boost::math::cdf(dist, -std::abs(out.t));
  return out;
}

TTestResult fold_split_ttest(const std::vector<double>& a,
                             const std::vector<double>& b,
                             std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw InputError("fold_split_ttest: need at least 2 folds");
  if (a.size() != b.size())
    throw InputError("fold_split_ttest: per-item vectors differ in length");
  if (a.size() < n_folds)
    throw InputError("fold_split_ttest: " + std::to_string(a.size()) +
                     " items cannot fill " + std::to_string(n_folds) +
                     " folds");

  std::vector<std::size_t> order(a.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<double> means_a, means_b;
  std::size_t base = a.size() / n_folds, extra = a.size() % n_folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::size_t len = base + (f < extra ? 1 : 0);
    std::vector<double> fa, fb;
    for (std::size_t i = 0; i < len; ++i, ++pos) {
      fa.push_back(a[order[pos]]);
      fb.push_back(b[order[pos]]);
    }
    means_a.push_back(mean_of(fa));
    means_b.push_back(mean_of(fb));
  }

  TTestResult out = welch_ttest(means_a, means_b);
  out.fold_means_a = std::move(means_a);
  out.fold_means_b = std::move(means_b);
  return out;
}

double silhouette(const Matrix& points, const std::vector<int>& labels) {
  if (labels.size() != points.rows())
    throw InputError("silhouette: label count does not match point count");
  std::size_t N = points.rows();
  if (N == 0) throw InputError("silhouette: no points");

  std::vector<int> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2)
    throw InputError("silhouette requires at least 2 clusters");

  std::vector<std::size_t> cluster_size(distinct.size(), 0);
  auto cluster_of = [&](int label) {
    return static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), label) -
        distinct.begin());
  };
  for (int l : labels) ++cluster_size[cluster_of(l)];

  Matrix dist(N, N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      double sq = 0.0;
      for (std::size_t d = 0; d < points.cols(); ++d) {
        double delta = points.at(i, d) - points.at(j, d);
        sq += delta * delta;
      }
      dist.at(i, j) = dist.at(j, i) = std::sqrt(sq);
    }

  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t own = cluster_of(labels[i]);
    if (cluster_size[own] == 1) continue;  // scores 0
    std::vector<double> sum(distinct.size(), 0.0);
    for (std::size_t j = 0; j < N; ++j)
      if (j != i) sum[cluster_of(labels[j])] += dist.at(i, j);
    double a = sum[own] / static_cast<double>(cluster_size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < distinct.size(); ++c)
      if (c != own)
        b = std::min(b, sum[c] / static_cast<double>(cluster_size[c]));
    double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(N);
}

}  // namespace serkit
