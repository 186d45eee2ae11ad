// Acceptance suite. One [PASS]/[FAIL] line per criterion; exit status is the
// number of failures. Every oracle here is coded from the documented
// contract, independent of the library routine it checks, so a shared bug
// cannot vouch for itself.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "../test_util.hpp"
#include "serkit/aggregate.hpp"
#include "serkit/cooccurrence.hpp"
#include "serkit/encodings.hpp"
#include "serkit/evaluate.hpp"
#include "serkit/io.hpp"
#include "serkit/losses.hpp"
#include "serkit/matrix.hpp"
#include "serkit/metrics.hpp"
#include "serkit/rng.hpp"
#include "serkit/synth.hpp"
#include "serkit/trainer.hpp"

using namespace serkit;
using testutil::TempDir;
using testutil::vc;
using testutil::write_file;

namespace {

struct Ctx {
  bool ok = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    ok = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << why;
  }
  void note(const std::string& what) {
    if (ok && detail.tellp() == 0) detail << what;
  }
};

std::vector<double> row_of(const Matrix& m, std::size_t i) {
  std::vector<double> r(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) r[j] = m.at(i, j);
  return r;
}

// ---------------------------------------------------------------- criterion 1

void criterion_1(Ctx& c) {
  // Vote distributions for the three five-vote cases.
  struct Case {
    std::vector<std::int64_t> votes;
    std::vector<double> expected;
  };
  const std::vector<Case> cases = {
      {{2, 0, 2, 1}, {0.4, 0.0, 0.4, 0.2}},
      {{2, 1, 1, 1}, {0.4, 0.2, 0.2, 0.2}},
      {{3, 0, 1, 1}, {0.6, 0.0, 0.2, 0.2}},
  };
  for (const auto& k : cases) {
    LabelVector v = fraction_distribution(vc(k.votes));
    if (v.values != k.expected) c.fail("distribution label mismatch");
  }

  // Threshold binarization keeps entries strictly above the cut.
  Matrix yp(2, 4);
  const double rows[2][4] = {{0.2, 0.4, 0.4, 0.0}, {0.45, 0.1, 0.0, 0.45}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) yp.at(i, j) = rows[i][j];
  Matrix b = binarize(yp, 0.25);
  if (row_of(b, 0) != std::vector<double>{0, 1, 1, 0})
    c.fail("binarization row 1");
  if (row_of(b, 1) != std::vector<double>{1, 0, 0, 1})
    c.fail("binarization row 2");

  // Cross-corpus projection: copy mapped columns, cut at 1/source_C.
  Matrix wide(1, 8);
  const double w[8] = {0.2, 0.2, 0.1, 0.1, 0.2, 0.1, 0.0, 0.1};
  for (int j = 0; j < 8; ++j) wide.at(0, j) = w[j];
  Projection pr = project_predictions(wide, {0, 1, 2, 3}, 8);
  if (row_of(pr.values, 0) != std::vector<double>{0.2, 0.2, 0.1, 0.1})
    c.fail("projection values");
  if (row_of(pr.binarized, 0) != std::vector<double>{1, 1, 0, 0})
    c.fail("projection binarization");
  c.note("3 vote cases, 2 binarization rows, 1 projection, all bit-exact");
}

// ---------------------------------------------------------------- criterion 2

void criterion_2(Ctx& c) {
  // Closed form: y_i = (alpha + v_i) / (alpha * C + total).
  const double alphas[] = {0.0, 0.75, 1.0};
  double max_dev = 0.0;
  int n_vectors = 0;
  for (std::int64_t a = 0; a <= 6; ++a)
    for (std::int64_t b = 0; b <= 6 - a; ++b)
      for (std::int64_t d = 0; d <= 6 - a - b; ++d)
        for (std::int64_t e = 0; e <= 6 - a - b - d; ++e) {
          std::int64_t total = a + b + d + e;
          if (total == 0) continue;  // no votes: the encoder refuses these
          ++n_vectors;
          VoteCount v = vc({a, b, d, e});
          for (double alpha : alphas) {
            LabelVector got = alpha_soft(v, alpha);
            for (int i = 0; i < 4; ++i) {
              double want = (alpha + static_cast<double>(v.counts[i])) /
                            (alpha * 4.0 + static_cast<double>(total));
              max_dev = std::max(max_dev, std::abs(got.values[i] - want));
            }
          }
        }
  if (n_vectors != 209) c.fail("expected 209 nonzero vote vectors");
  if (max_dev > 1e-12) c.fail("max deviation " + std::to_string(max_dev));
  c.note("209 vote vectors x 3 alphas, max dev " + std::to_string(max_dev));
}

// ---------------------------------------------------------------- criterion 3

SynthConfig small_config(std::size_t n_classes, std::uint64_t seed,
                         double accuracy, double coverage) {
  SynthConfig cfg;
  cfg.classes.clear();
  for (std::size_t i = 0; i < n_classes; ++i)
    cfg.classes.push_back("c" + std::to_string(i));
  cfg.n_utterances = 20;
  cfg.seed = seed;
  for (int r = 0; r < 5; ++r)
    cfg.raters.push_back({"r" + std::to_string(r),
                          accuracy_confusion(n_classes, accuracy), coverage});
  cfg.features.dimension = 2;  // features unused here, keep generation cheap
  return cfg;
}

void criterion_3(Ctx& c) {
  Rng rng(301);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t C = (t % 2 == 0) ? 4 : 8;
    double acc = 0.3 + 0.6 * rng.uniform();
    double cov = 0.5 + 0.5 * rng.uniform();
    Corpus corpus = [&] {
      SynthResult res = generate(small_config(C, 9000 + t, acc, cov));
      if (t % 10 != 0) return res.corpus;
      // Periodically graft on utterances with out-of-set votes so the
      // no-consensus paths get exercised too.
      std::vector<Utterance> us = res.corpus.utterances();
      us.push_back(testutil::utt("xx1", {{"r0", "zz"}, {"r1", "zz"}}));
      us.push_back(testutil::utt("xx2", {{"r0", "c0"}, {"r1", "zz"}}));
      return Corpus(res.corpus.classes(), std::move(us), "grafted");
    }();

    auto kept_set = [&](Rule r) {
      SplitResult s = consensus_split(corpus, r);
      return std::set<std::string>(s.kept.begin(), s.kept.end());
    };
    std::set<std::string> mr = kept_set(Rule::MR);
    std::set<std::string> pr = kept_set(Rule::PR);
    std::set<std::string> ar = kept_set(Rule::AR);
    if (!std::includes(pr.begin(), pr.end(), mr.begin(), mr.end()))
      c.fail("corpus " + std::to_string(t) + ": majority set not in plurality set");
    if (!std::includes(ar.begin(), ar.end(), pr.begin(), pr.end()))
      c.fail("corpus " + std::to_string(t) + ": plurality set not in all-inclusive set");
    if (ar.size() != corpus.size())
      c.fail("corpus " + std::to_string(t) + ": all-inclusive dropped something");
    if (loss_report(corpus, Rule::AR).data_loss != 0.0)
      c.fail("corpus " + std::to_string(t) + ": all-inclusive data loss nonzero");
    ++checked;
    if (!c.ok) break;
  }
  c.note(std::to_string(checked) + " corpora, nested kept-sets, inclusive loss 0");
}

// ---------------------------------------------------------------- criterion 4

CoCountMatrix brute_co_counts(const Corpus& corpus) {
  std::size_t C = corpus.classes().size();
  CoCountMatrix m(C);
  for (const auto& u : corpus.utterances()) {
    VoteCount v = vote_counts(u, corpus.classes());
    std::vector<std::size_t> present;
    for (std::size_t j = 0; j < C; ++j)
      if (v.counts[j] > 0) present.push_back(j);
    for (std::size_t j : present)
      for (std::size_t z : present) m.at(j, z) += 1;
  }
  return m;
}

void criterion_4(Ctx& c) {
  Rng rng(401);
  int full_diag = 0;
  for (int t = 0; t < 200; ++t) {
    std::size_t C = (t % 2 == 0) ? 4 : 8;
    SynthConfig cfg = small_config(C, 7000 + t, 0.3 + 0.6 * rng.uniform(), 1.0);
    cfg.n_utterances = 5 + rng.below(46);  // <= 50
    Corpus corpus = generate(cfg).corpus;

    CoCountMatrix counts = co_counts(corpus);
    if (!(counts == brute_co_counts(corpus))) {
      c.fail("corpus " + std::to_string(t) + ": count recount mismatch");
      break;
    }
    bool all_present = true;
    for (std::size_t j = 0; j < C; ++j)
      if (counts.at(j, j) == 0) all_present = false;
    if (!all_present) continue;
    ++full_diag;
    Matrix p = penalty_from_weights(
        co_weights(counts, corpus.classes().names()));
    for (std::size_t j = 0; j < C; ++j)
      for (std::size_t z = 0; z < C; ++z) {
        if (j == z && p.at(j, z) != 0.0)
          c.fail("corpus " + std::to_string(t) + ": penalty diagonal nonzero");
        if (p.at(j, z) < 0.0 || p.at(j, z) > 1.0)
          c.fail("corpus " + std::to_string(t) + ": penalty entry outside [0,1]");
      }
    if (!c.ok) break;
  }
  c.note("200 corpora recounted, " + std::to_string(full_diag) +
         " with all classes voted checked for penalty bounds");
}

// ---------------------------------------------------------------- criterion 5

void criterion_5(Ctx& c) {
  Rng rng(501);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::size_t N = 2 + rng.below(29), C = 2 + rng.below(7);
    Matrix L(N, C), P(C, C);
    for (auto& v : L.data()) v = 3.0 * rng.uniform();
    for (std::size_t j = 0; j < C; ++j)
      for (std::size_t z = 0; z < C; ++z)
        P.at(j, z) = (j == z) ? 0.0 : rng.uniform();

    double triple = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < C; ++j)
        for (std::size_t z = 0; z < C; ++z) triple += P.at(j, z) * L.at(i, j);
    double collapsed = 0.0;
    for (std::size_t j = 0; j < C; ++j) {
      double w = 0.0;
      for (std::size_t z = 0; z < C; ++z) w += P.at(j, z);
      for (std::size_t i = 0; i < N; ++i) collapsed += w * L.at(i, j);
    }
    double got = penalized_loss(L, P);
    double scale = std::max({1.0, std::abs(triple), std::abs(collapsed)});
    worst = std::max(worst, std::abs(got - triple) / scale);
    worst = std::max(worst, std::abs(got - collapsed) / scale);
  }
  if (worst > 1e-12) c.fail("relative error " + std::to_string(worst));
  c.note("100 instances, triple-sum and row-sum routes agree to " +
         std::to_string(worst));
}

// ---------------------------------------------------------------- criterion 6

// Everything below is recomputed from scratch: own head mappings, own
// per-entry losses, own penalty expansion.
double oracle_objective(const Matrix& yt, const Matrix& scores, LossKind kind,
                        const Matrix* P, double alpha, double beta) {
  std::size_t N = scores.rows(), C = scores.cols();
  Matrix p(N, C);
  if (kind == LossKind::BCE) {
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < C; ++j)
        p.at(i, j) = 1.0 / (1.0 + std::exp(-scores.at(i, j)));
  } else {
    for (std::size_t i = 0; i < N; ++i) {
      double mx = scores.at(i, 0);
      for (std::size_t j = 1; j < C; ++j) mx = std::max(mx, scores.at(i, j));
      double zsum = 0.0;
      for (std::size_t j = 0; j < C; ++j)
        zsum += std::exp(scores.at(i, j) - mx);
      for (std::size_t j = 0; j < C; ++j)
        p.at(i, j) = std::exp(scores.at(i, j) - mx) / zsum;
    }
  }
  auto clamp = [](double v) {
    return std::min(std::max(v, kProbFloor), 1.0 - kProbFloor);
  };
  Matrix L(N, C);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      double t = yt.at(i, j), q = clamp(p.at(i, j));
      if (kind == LossKind::CE)
        L.at(i, j) = -t * std::log(q);
      else if (kind == LossKind::BCE)
        L.at(i, j) = -t * std::log(q) - (1.0 - t) * std::log(1.0 - q);
      else
        L.at(i, j) = t > 0.0 ? t * (std::log(t) - std::log(q)) : 0.0;
    }
  double base = 0.0;
  for (double v : L.data()) base += v;
  double pen = 0.0;
  if (P)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < C; ++j)
        for (std::size_t z = 0; z < C; ++z)
          pen += P->at(j, z) * L.at(i, j);
  return beta * base + alpha * pen;
}

void criterion_6(Ctx& c) {
  Rng rng(601);
  double worst = 0.0;
  const LossKind kinds[] = {LossKind::CE, LossKind::BCE, LossKind::KLD};
  for (int t = 0; t < 100; ++t) {
    LossKind kind = kinds[t % 3];
    bool with_penalty = (t / 3) % 2 == 0;
    std::size_t N = 1 + rng.below(8), C = 2 + rng.below(5);
    Matrix yt(N, C), scores(N, C);
    for (auto& v : scores.data()) v = 6.0 * rng.uniform() - 3.0;
    if (kind == LossKind::BCE) {
      for (auto& v : yt.data())
        v = rng.below(2) ? 1.0 : (rng.below(2) ? 0.0 : rng.uniform());
    } else {
      for (std::size_t i = 0; i < N; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < C; ++j) {
          yt.at(i, j) = -std::log(1.0 - rng.uniform());
          sum += yt.at(i, j);
        }
        for (std::size_t j = 0; j < C; ++j) yt.at(i, j) /= sum;
      }
    }
    Matrix P(C, C);
    double alpha = 0.0, beta = 1.0;
    if (with_penalty) {
      alpha = 0.2 + 1.3 * rng.uniform();
      beta = 1.5 * rng.uniform();
      for (std::size_t j = 0; j < C; ++j)
        for (std::size_t z = 0; z < C; ++z)
          P.at(j, z) = (j == z) ? 0.0 : rng.uniform();
    }
    const Matrix* pp = with_penalty ? &P : nullptr;

    Matrix analytic = loss_gradient(yt, scores, kind, pp, alpha, beta);
    const double h = 1e-6;
    double max_abs = 0.0, max_ref = 0.0;
    Matrix s = scores;
    for (std::size_t i = 0; i < s.data().size(); ++i) {
      double keep = s.data()[i];
      s.data()[i] = keep + h;
      double up = oracle_objective(yt, s, kind, pp, alpha, beta);
      s.data()[i] = keep - h;
      double dn = oracle_objective(yt, s, kind, pp, alpha, beta);
      s.data()[i] = keep;
      double fd = (up - dn) / (2.0 * h);
      max_abs = std::max(max_abs, std::abs(analytic.data()[i] - fd));
      max_ref = std::max(max_ref, std::abs(fd));
    }
    worst = std::max(worst, max_abs / std::max(max_ref, 1e-12));
  }
  if (worst > 1e-5) c.fail("relative error " + std::to_string(worst));
  c.note("100 instances across 3 losses, worst rel err " +
         std::to_string(worst));
}

// ---------------------------------------------------------------- criterion 7

void criterion_7(Ctx& c) {
  SynthConfig scfg = small_config(4, 77, 0.8, 1.0);
  scfg.n_utterances = 120;
  scfg.features.dimension = 6;
  SynthResult res = generate(scfg);
  Matrix X = align_features(res.corpus, res.features);
  Matrix Y(res.corpus.size(), 4);
  for (std::size_t i = 0; i < res.corpus.size(); ++i) {
    LabelVector f = fraction_distribution(
        vote_counts(res.corpus.utterances()[i], res.corpus.classes()));
    for (int j = 0; j < 4; ++j) Y.at(i, j) = f.values[j];
  }

  TrainConfig base;
  base.loss = LossKind::CE;
  base.hidden = 12;
  base.learning_rate = 0.1;
  base.batch_size = 16;
  base.epochs = 20;
  base.seed = 9;
  TrainResult plain = train(X, Y, base);

  Matrix random_p(4, 4), zero_p(4, 4);
  Rng rng(701);
  for (int j = 0; j < 4; ++j)
    for (int z = 0; z < 4; ++z) random_p.at(j, z) = j == z ? 0.0 : rng.uniform();

  TrainConfig zero_alpha = base;
  zero_alpha.alpha = 0.0;
  zero_alpha.penalty = random_p;
  TrainResult r1 = train(X, Y, zero_alpha);

  TrainConfig zero_matrix = base;
  zero_matrix.alpha = 0.7;
  zero_matrix.penalty = zero_p;
  TrainResult r2 = train(X, Y, zero_matrix);

  auto same = [&](const TrainResult& r, const char* label) {
    if (!(r.params == plain.params)) c.fail(std::string(label) + ": parameters differ");
    if (r.best_epoch != plain.best_epoch) c.fail(std::string(label) + ": best epoch differs");
    if (r.trace.size() != plain.trace.size()) {
      c.fail(std::string(label) + ": trace length differs");
      return;
    }
    for (std::size_t e = 0; e < r.trace.size(); ++e)
      if (r.trace[e].train_loss != plain.trace[e].train_loss ||
          r.trace[e].dev_loss != plain.trace[e].dev_loss)
        c.fail(std::string(label) + ": trace differs at epoch " + std::to_string(e + 1));
  };
  same(r1, "alpha=0 with a random matrix");
  same(r2, "alpha=0.7 with a zero matrix");
  c.note("both degenerate runs bitwise equal to the unpenalized run, " +
         std::to_string(plain.trace.size()) + " epochs");
}

// ---------------------------------------------------------------- criterion 8

F1Scores brute_f1(const Matrix& t, const Matrix& p) {
  std::size_t N = t.rows(), C = t.cols();
  double macro = 0.0, weighted = 0.0, support_total = 0.0;
  double tp_all = 0.0, fp_all = 0.0, fn_all = 0.0;
  for (std::size_t j = 0; j < C; ++j) {
    double tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < N; ++i) {
      bool tv = t.at(i, j) != 0.0, pv = p.at(i, j) != 0.0;
      tp += tv && pv;
      fp += !tv && pv;
      fn += tv && !pv;
      support += tv;
    }
    double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    macro += f1 / static_cast<double>(C);
    weighted += support * f1;
    support_total += support;
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  double mp = tp_all + fp_all > 0 ? tp_all / (tp_all + fp_all) : 0.0;
  double mr = tp_all + fn_all > 0 ? tp_all / (tp_all + fn_all) : 0.0;
  F1Scores out;
  out.macro = macro;
  out.micro = mp + mr > 0 ? 2 * mp * mr / (mp + mr) : 0.0;
  out.weighted = support_total > 0 ? weighted / support_total : 0.0;
  return out;
}

UarUap brute_uar_uap(const std::vector<int>& t, const std::vector<int>& p,
                     std::size_t C) {
  UarUap out;
  for (std::size_t j = 0; j < C; ++j) {
    double correct = 0, truth_n = 0, pred_n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      bool hit = t[i] == static_cast<int>(j);
      bool said = p[i] == static_cast<int>(j);
      correct += hit && said;
      truth_n += hit;
      pred_n += said;
    }
    out.uar += (truth_n > 0 ? correct / truth_n : 0.0) / static_cast<double>(C);
    out.uap += (pred_n > 0 ? correct / pred_n : 0.0) / static_cast<double>(C);
  }
  return out;
}

MultilabelMetrics brute_multilabel(const Matrix& t, const Matrix& yp) {
  std::size_t N = t.rows(), C = t.cols();
  MultilabelMetrics out;
  double rank_sum = 0.0, cover_sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < C; ++j) {
      bool pv = yp.at(i, j) > 0.5;
      out.hamming += (t.at(i, j) != 0.0) != pv;
    }
    std::vector<std::size_t> rel, irr;
    for (std::size_t j = 0; j < C; ++j)
      (t.at(i, j) != 0.0 ? rel : irr).push_back(j);
    if (rel.empty()) {
      ++out.skipped_rows;
      continue;
    }
    ++scored;
    double wrong = 0.0;
    for (std::size_t r : rel)
      for (std::size_t s : irr) wrong += yp.at(i, r) <= yp.at(i, s);
    if (!irr.empty())
      rank_sum += wrong / static_cast<double>(rel.size() * irr.size());
    double depth = 0.0;
    for (std::size_t r : rel) {
      double d = 0.0;
      for (std::size_t j = 0; j < C; ++j) d += yp.at(i, j) >= yp.at(i, r);
      depth = std::max(depth, d);
    }
    cover_sum += depth;
  }
  out.hamming /= static_cast<double>(N * C);
  out.ranking_loss = scored ? rank_sum / static_cast<double>(scored) : 0.0;
  out.coverage = scored ? cover_sum / static_cast<double>(scored) : 0.0;
  return out;
}

void criterion_8(Ctx& c) {
  double worst = 0.0;
  auto check_all = [&](const Matrix& truth, Rng& rng) {
    std::size_t N = truth.rows(), C = truth.cols();
    Matrix pred_bin(N, C), yp(N, C);
    for (auto& v : pred_bin.data()) v = static_cast<double>(rng.below(2));
    for (auto& v : yp.data()) v = rng.uniform();

    F1Scores got = f1_scores(truth, pred_bin), want = brute_f1(truth, pred_bin);
    worst = std::max({worst, std::abs(got.macro - want.macro),
                      std::abs(got.micro - want.micro),
                      std::abs(got.weighted - want.weighted)});
    MultilabelMetrics mg = multilabel_metrics(truth, yp);
    MultilabelMetrics mw = brute_multilabel(truth, yp);
    worst = std::max({worst, std::abs(mg.hamming - mw.hamming),
                      std::abs(mg.ranking_loss - mw.ranking_loss),
                      std::abs(mg.coverage - mw.coverage)});
    if (mg.skipped_rows != mw.skipped_rows) worst = 1.0;
  };

  // Exhaustive truth matrices while the grid is small enough to enumerate.
  long exhaustive = 0;
  for (std::size_t N = 1; N <= 8; ++N)
    for (std::size_t C = 1; C <= 4; ++C) {
      if (N * C > 16) continue;
      Rng rng(800 + N * 16 + C);
      for (std::uint64_t mask = 0; mask < (1ull << (N * C)); ++mask) {
        Matrix truth(N, C);
        for (std::size_t b = 0; b < N * C; ++b)
          truth.data()[b] = static_cast<double>((mask >> b) & 1);
        check_all(truth, rng);
        ++exhaustive;
      }
    }

  // Random truths, 50 seeds per shape, for the grids past enumeration, plus
  // label-vector rates on every shape.
  for (std::size_t N = 1; N <= 8; ++N)
    for (std::size_t C = 1; C <= 4; ++C)
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(880000 + (N * 16 + C) * 100 + seed);
        if (N * C > 16) {
          Matrix truth(N, C);
          for (auto& v : truth.data()) v = static_cast<double>(rng.below(2));
          check_all(truth, rng);
        }
        std::vector<int> t(N), p(N);
        for (auto& v : t) v = static_cast<int>(rng.below(C));
        for (auto& v : p) v = static_cast<int>(rng.below(C));
        UarUap got = uar_uap(t, p, C);
        UarUap want = brute_uar_uap(t, p, C);
        worst = std::max({worst, std::abs(got.uar - want.uar),
                          std::abs(got.uap - want.uap)});
      }

  if (worst > 1e-12) c.fail("worst deviation " + std::to_string(worst));
  c.note(std::to_string(exhaustive) +
         " exhaustive truth matrices plus 50 random seeds per shape, worst dev " +
         std::to_string(worst));
}

// ---------------------------------------------------------------- criterion 9

// The arms must land on opposite sides of the 1/C cut at mixture
// utterances. With weight 0.6 and 20 raters the minority's vote share sits
// near 0.37 (stays in the fraction label and the binarized truth) while its
// chance of winning the majority vote is under 0.1 (vanishes from hard
// labels). Symmetric mixtures with few raters give no contrast: the
// majority winner is then a fair coin, and a model trained on those hard
// labels converges to the same 50/50 the fractions carry.
SynthConfig ambiguous_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.classes = {"c0", "c1", "c2", "c3"};
  cfg.n_utterances = 400;
  cfg.seed = seed;
  for (int r = 0; r < 20; ++r)
    cfg.raters.push_back({"r" + std::to_string(r), accuracy_confusion(4, 0.85),
                          1.0});
  AmbiguityConfig amb;
  amb.fraction = 0.3;
  amb.weight = 0.6;
  amb.pairs = {{0, 1}, {2, 3}};
  cfg.ambiguity = amb;
  cfg.features.dimension = 8;
  cfg.features.separation = 3.0;
  cfg.features.stddev = 0.9;
  return cfg;
}

ModelParams fit(const Matrix& X, const Matrix& Y, LossKind loss,
                std::uint64_t seed, double alpha = 0.0, double beta = 1.0,
                std::optional<Matrix> penalty = std::nullopt) {
  TrainConfig cfg;
  cfg.loss = loss;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.penalty = std::move(penalty);
  cfg.hidden = 16;
  cfg.learning_rate = 0.1;
  cfg.batch_size = 32;
  cfg.epochs = 60;
  cfg.patience = 60;
  cfg.seed = seed;
  return train(X, Y, cfg).params;
}

void criterion_9(Ctx& c) {
  std::vector<double> inclusive_f1, majority_f1;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthResult tr = generate(ambiguous_config(100 + seed));
    SynthResult te = generate(ambiguous_config(1100 + seed));
    Matrix X = align_features(tr.corpus, tr.features);
    std::size_t n = tr.corpus.size();

    // Inclusive arm: every utterance, vote-share distribution targets.
    Matrix Yf(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
      LabelVector f = fraction_distribution(
          vote_counts(tr.corpus.utterances()[i], tr.corpus.classes()));
      for (int j = 0; j < 4; ++j) Yf.at(i, j) = f.values[j];
    }
    ModelParams m_incl = fit(X, Yf, LossKind::KLD, 40 + seed);

    // Majority arm: only majority-kept utterances, one-hot targets.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i) {
      VoteCount v =
          vote_counts(tr.corpus.utterances()[i], tr.corpus.classes());
      if (aggregate_mr(v).kept) keep.push_back(i);
    }
    Matrix Xm(keep.size(), X.cols()), Ym(keep.size(), 4);
    for (std::size_t k = 0; k < keep.size(); ++k) {
      VoteCount v = vote_counts(tr.corpus.utterances()[keep[k]],
                                tr.corpus.classes());
      auto hard = hard_onehot(v, Rule::MR, 0, tr.corpus.utterances()[keep[k]].id);
      for (std::size_t j = 0; j < X.cols(); ++j) Xm.at(k, j) = X.at(keep[k], j);
      for (int j = 0; j < 4; ++j) Ym.at(k, j) = hard->values[j];
    }
    ModelParams m_maj = fit(Xm, Ym, LossKind::CE, 40 + seed);

    EvalConfig ec;
    ec.rule = TestRule::AR;
    inclusive_f1.push_back(
        evaluate_model(m_incl, te.corpus, te.features, ec).f1.macro);
    majority_f1.push_back(
        evaluate_model(m_maj, te.corpus, te.features, ec).f1.macro);
  }

  double mean_i = 0.0, mean_m = 0.0;
  int wins = 0;
  for (std::size_t s = 0; s < 10; ++s) {
    mean_i += inclusive_f1[s] / 10.0;
    mean_m += majority_f1[s] / 10.0;
    wins += inclusive_f1[s] > majority_f1[s];
  }
  TTestResult tt = fold_split_ttest(inclusive_f1, majority_f1, 5, 9);
  std::ostringstream sum;
  sum << "inclusive-label mean F1 " << mean_i << " vs majority-label " << mean_m
      << ", wins " << wins << "/10, fold t-test t=" << tt.t << " p=" << tt.p;
  if (mean_i < mean_m - 0.01) c.fail("mean gap beyond tolerance; " + sum.str());
  if (wins < 7) c.fail("fewer than 7/10 wins; " + sum.str());
  c.note(sum.str());
}

// --------------------------------------------------------------- criterion 10

SynthConfig lopsided_config(std::uint64_t seed) {
  // One heavy mixture pair and two isolated classes with a low stray-vote
  // rate, so the penalty row sums genuinely differ between classes and the
  // annotation co-occurrence pattern has real structure to recover.
  SynthConfig cfg;
  cfg.classes = {"c0", "c1", "c2", "c3"};
  cfg.n_utterances = 400;
  cfg.seed = seed;
  for (int r = 0; r < 3; ++r)
    cfg.raters.push_back({"r" + std::to_string(r), accuracy_confusion(4, 0.9),
                          1.0});
  AmbiguityConfig amb;
  amb.fraction = 0.5;
  amb.weight = 0.5;
  amb.pairs = {{0, 1}};
  cfg.ambiguity = amb;
  cfg.features.dimension = 8;
  cfg.features.separation = 2.5;
  cfg.features.stddev = 1.2;
  return cfg;
}

// Co-occurrence pattern per utterance: counts scaled by the corpus size so
// train and test cohorts are comparable.
Matrix per_utterance_pattern(const CoCountMatrix& counts, std::size_t n) {
  Matrix m = counts.as_matrix();
  for (auto& v : m.data()) v /= static_cast<double>(n);
  return m;
}

void criterion_10(Ctx& c) {
  int reductions = 0;
  double mean_pen = 0.0, mean_plain = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthResult tr = generate(lopsided_config(300 + seed));
    SynthResult te = generate(lopsided_config(1300 + seed));
    Matrix X = align_features(tr.corpus, tr.features);
    std::size_t n = tr.corpus.size();

    Matrix Y(n, 4);
    for (std::size_t i = 0; i < n; ++i) {
      LabelVector mh = multi_hot(
          vote_counts(tr.corpus.utterances()[i], tr.corpus.classes()));
      for (int j = 0; j < 4; ++j) Y.at(i, j) = mh.values[j];
    }
    Matrix target = per_utterance_pattern(co_counts(tr.corpus), n);
    Matrix P = penalty_from_weights(
        co_weights(co_counts(tr.corpus), tr.corpus.classes().names()));

    auto fit_bce = [&](double alpha, std::optional<Matrix> penalty) {
      TrainConfig cfg;
      cfg.loss = LossKind::BCE;
      cfg.alpha = alpha;
      cfg.beta = 1.0;
      cfg.penalty = std::move(penalty);
      cfg.hidden = 8;
      cfg.learning_rate = 0.02;
      cfg.batch_size = 32;
      cfg.epochs = 40;
      cfg.patience = 40;
      cfg.seed = 50 + seed;
      return train(X, Y, cfg).params;
    };
    ModelParams penalized = fit_bce(1.0, P);
    ModelParams plain = fit_bce(0.0, std::nullopt);

    Matrix Xte = align_features(te.corpus, te.features);
    auto distance = [&](const ModelParams& m) {
      CoCountMatrix counts =
          co_counts_from_binary(binarize(predict(m, Xte), 0.5));
      return frobenius_distance(
          per_utterance_pattern(counts, te.corpus.size()), target);
    };
    double d_pen = distance(penalized);
    double d_plain = distance(plain);
    mean_pen += d_pen / 10.0;
    mean_plain += d_plain / 10.0;
    reductions += d_pen <= d_plain;
  }
  std::ostringstream sum;
  sum << "penalty-augmented mean distance " << mean_pen << " vs unpenalized "
      << mean_plain << ", reduced in " << reductions << "/10 seeds";
  if (reductions < 7) c.fail(sum.str());
  c.note(sum.str());
}

// --------------------------------------------------------------- criterion 11

int run_cli(const std::string& args) {
  std::string cmd =
      std::string(SERKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void criterion_11(Ctx& c) {
  TempDir work, redo;
  write_file(work.file("gen.json"), R"({
    "classes": ["N", "H", "A", "S"],
    "n_utterances": 120,
    "seed": 21,
    "raters": [
      {"rater_id": "r1", "accuracy": 0.8},
      {"rater_id": "r2", "accuracy": 0.8},
      {"rater_id": "r3", "accuracy": 0.8, "coverage": 0.8}
    ],
    "ambiguity": {"fraction": 0.25, "weight": 0.5, "pairs": [[0, 3]]},
    "features": {"dimension": 5, "separation": 2.0, "stddev": 0.8}
  })");

  auto must = [&](const std::string& args, const char* what) {
    if (run_cli(args) != 0) c.fail(std::string("command failed: ") + what);
    return c.ok;
  };
  std::string flags = work.file("corpus.csv") + " --classes N,H,A,S ";

  if (!must("synth --config " + work.file("gen.json") + " --out-dir " +
                work.path, "synth")) return;
  if (!must("aggregate " + flags + "--rule pr --out-dir " + work.path,
            "aggregate")) return;
  if (!must("encode " + flags + "--kind fraction --out " +
                work.file("targets.csv"), "encode")) return;
  if (!must("train " + flags + "--features " + work.file("features.csv") +
                " --targets " + work.file("targets.csv") +
                " --loss kld --hidden 8 --epochs 15 --seed 5 --out " +
                work.file("model.json"), "train")) return;
  if (!must("evaluate " + flags + "--model " + work.file("model.json") +
                " --features " + work.file("features.csv") +
                " --test-rule ar --out " + work.file("report.json"),
            "evaluate")) return;

  struct Replay {
    const char* manifest;
    std::vector<const char*> files;          // all outputs of the run
    std::vector<const char*> portable;       // free of embedded paths
  };
  const std::vector<Replay> replays = {
      {"synth_run_manifest.json",
       {"corpus.csv", "features.csv", "truth.json", "synth_summary.json"},
       {"corpus.csv", "features.csv", "truth.json"}},
      {"aggregate_run_manifest.json",
       {"outcomes.csv", "loss_report.json", "loss_report.txt"},
       {"outcomes.csv", "loss_report.json", "loss_report.txt"}},
      {"encode_run_manifest.json", {"targets.csv"}, {"targets.csv"}},
      {"train_run_manifest.json",
       {"model.json", "train_summary.json"},
       {"model.json"}},
      {"evaluate_run_manifest.json", {"report.json"}, {"report.json"}},
  };

  // In-place replay must reproduce every output file. Summary files embed
  // the resolved output paths, so only the portable set is comparable when
  // the replay is redirected into a fresh directory.
  int files_compared = 0;
  for (const auto& r : replays) {
    std::vector<std::string> before;
    for (const char* f : r.files) before.push_back(read_file(work.file(f)));
    if (run_cli("replay --manifest " + work.file(r.manifest)) != 0) {
      c.fail(std::string("in-place replay failed for ") + r.manifest);
      return;
    }
    for (std::size_t i = 0; i < r.files.size(); ++i) {
      if (read_file(work.file(r.files[i])) != before[i])
        c.fail(std::string(r.files[i]) + " differs after in-place replay");
      ++files_compared;
    }

    if (run_cli("replay --manifest " + work.file(r.manifest) + " --out-dir " +
                redo.path) != 0) {
      c.fail(std::string("redirected replay failed for ") + r.manifest);
      return;
    }
    for (const char* f : r.portable) {
      if (read_file(redo.file(f)) != read_file(work.file(f)))
        c.fail(std::string(f) + " differs after redirected replay");
      ++files_compared;
    }
  }
  c.note("5 subcommands replayed in place and redirected, " +
         std::to_string(files_compared) + " file comparisons byte-identical");
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    double budget_s;
    void (*fn)(Ctx&);
  };
  const std::vector<Entry> entries = {
      {1, "worked-example labels, binarization and projection", 1, criterion_1},
      {2, "additive-smoothing soft labels vs closed-form oracle", 5, criterion_2},
      {3, "consensus-rule kept-set nesting and inclusive zero loss", 30, criterion_3},
      {4, "co-occurrence recount and penalty well-formedness", 10, criterion_4},
      {5, "penalized loss equals triple-sum and row-sum routes", 5, criterion_5},
      {6, "analytic gradients vs central differences", 30, criterion_6},
      {7, "degenerate penalty configurations are bitwise inert", 60, criterion_7},
      {8, "classification metrics vs exhaustive brute force", 120, criterion_8},
      {9, "inclusive fraction training vs majority hard training", 300, criterion_9},
      {10, "penalty training pulls predicted co-occurrence to target", 300, criterion_10},
      {11, "replayed run manifests reproduce outputs byte for byte", 60, criterion_11},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Ctx ctx;
    auto t0 = std::chrono::steady_clock::now();
    e.fn(ctx);
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    if (secs > e.budget_s)
      ctx.fail("runtime " + std::to_string(secs) + "s over the " +
               std::to_string(e.budget_s) + "s budget");
    std::cout << (ctx.ok ? "[PASS]" : "[FAIL]") << " criterion " << e.id
              << ": " << e.name << " (" << ctx.detail.str() << ") ["
              << secs << "s]\n";
    failures += !ctx.ok;
  }
  if (failures) std::cout << failures << " criteria failed\n";
  else std::cout << "all 11 criteria passed\n";
  return failures;
}
