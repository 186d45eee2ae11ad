#include "serkit/losses.hpp"

#include <algorithm>
#include <cmath>

#include "serkit/cooccurrence.hpp"
#include "serkit/errors.hpp"

namespace serkit {

LossKind loss_kind_from_string(std::string_view s) {
  if (s == "ce") return LossKind::CE;
  if (s == "bce") return LossKind::BCE;
  if (s == "kld") return LossKind::KLD;
  throw InputError("unknown loss '" + std::string(s) +
                   "' (expected ce, bce, or kld)");
}

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::CE: return "ce";
    case LossKind::BCE: return "bce";
    case LossKind::KLD: return "kld";
  }
  return "?";
}

Head head_for(LossKind k) {
  return k == LossKind::BCE ? Head::Sigmoid : Head::Softmax;
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

namespace {

double clamp_prob(double p) {
  return std::min(std::max(p, kProbFloor), 1.0 - kProbFloor);
}

void check_pair(const Matrix& yt, const Matrix& yp) {
  if (!yt.same_shape(yp))
    throw InputError("loss: target and prediction shapes differ");
  for (double t : yt.data())
    if (!(t >= 0.0 && t <= 1.0))
      throw InputError("loss: target entry outside [0, 1]");
  for (double p : yp.data())
    if (!std::isfinite(p))
      throw InputError("loss: non-finite prediction entry");
}

}  // namespace

Matrix elementwise_loss(const Matrix& yt, const Matrix& yp, LossKind kind) {
  check_pair(yt, yp);
  Matrix L(yt.rows(), yt.cols());
  for (std::size_t i = 0; i < yt.data().size(); ++i) {
    double t = yt.data()[i];
    double p = clamp_prob(yp.data()[i]);
    double v = 0.0;
    switch (kind) {
      case LossKind::CE:
        v = -t * std::log(p);
        break;
      case LossKind::BCE:
        v = -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
        break;
      case LossKind::KLD:
        v = t > 0.0 ? t * (std::log(t) - std::log(p)) : 0.0;
        break;
    }
    L.data()[i] = v;
  }
  return L;
}

double sum_loss(const Matrix& L) { return pairwise_sum(L.data()); }

double penalized_loss(const Matrix& L, const Matrix& p) {
  if (p.rows() != L.cols() || p.cols() != L.cols())
    throw InputError("penalized loss: penalty matrix must be CxC for C = " +
                     std::to_string(L.cols()));
  std::size_t C = L.cols();
  // Literal expansion: one term per (i, j, z), pairwise-summed.
  std::vector<double> terms;
  terms.reserve(L.rows() * C * C);
  for (std::size_t i = 0; i < L.rows(); ++i)
    for (std::size_t j = 0; j < C; ++j)
      for (std::size_t z = 0; z < C; ++z)
        terms.push_back(p.at(j, z) * L.at(i, j));
  return pairwise_sum(terms);
}

double total_loss(double base, double pen, double alpha, double beta) {
  return beta * base + alpha * pen;
}

Matrix apply_head(const Matrix& scores, Head head) {
  Matrix out(scores.rows(), scores.cols());
  if (head == Head::Softmax) {
    for (std::size_t r = 0; r < scores.rows(); ++r) {
      double mx = scores.at(r, 0);
      for (std::size_t c = 1; c < scores.cols(); ++c)
        mx = std::max(mx, scores.at(r, c));
      double denom = 0.0;
      for (std::size_t c = 0; c < scores.cols(); ++c) {
        double e = std::exp(scores.at(r, c) - mx);
        out.at(r, c) = e;
        denom += e;
      }
      for (std::size_t c = 0; c < scores.cols(); ++c) out.at(r, c) /= denom;
    }
  } else {
    for (std::size_t i = 0; i < scores.data().size(); ++i) {
      double s = scores.data()[i];
      // Stable in both tails.
      out.data()[i] = s >= 0.0 ? 1.0 / (1.0 + std::exp(-s))
                               : std::exp(s) / (1.0 + std::exp(s));
    }
  }
  return out;
}

Matrix loss_gradient(const Matrix& yt, const Matrix& scores, LossKind kind,
                     const Matrix* penalty, double alpha, double beta) {
  if (!yt.same_shape(scores))
    throw InputError("loss gradient: target and score shapes differ");
  std::size_t C = yt.cols();
  // Per-class weights the objective collapses to. Without a penalty the row
  // sums are zeros and this is uniformly beta via the same arithmetic.
  std::vector<double> r(C, 0.0);
  if (penalty) {
    if (penalty->rows() != C || penalty->cols() != C)
      throw InputError("loss gradient: penalty matrix must be CxC");
    r = row_sum_weights(*penalty);
  }
  std::vector<double> w(C);
  for (std::size_t j = 0; j < C; ++j) w[j] = beta + alpha * r[j];

  Matrix yp = apply_head(scores, head_for(kind));
  Matrix g(yt.rows(), C);
  if (kind == LossKind::BCE) {
    for (std::size_t i = 0; i < yt.rows(); ++i)
      for (std::size_t j = 0; j < C; ++j)
        g.at(i, j) = w[j] * (yp.at(i, j) - yt.at(i, j));
  } else {
    // CE and KLD share the same score gradient: the target-entropy part of
    // KLD does not depend on the scores.
    for (std::size_t i = 0; i < yt.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < C; ++j) s += w[j] * yt.at(i, j);
      for (std::size_t j = 0; j < C; ++j)
        g.at(i, j) = -w[j] * yt.at(i, j) + yp.at(i, j) * s;
    }
  }
  return g;
}

}  // namespace serkit
