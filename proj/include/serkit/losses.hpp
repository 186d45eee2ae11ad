#pragma once

#include <string_view>
#include <vector>

#include "serkit/matrix.hpp"

namespace serkit {

enum class LossKind { CE, BCE, KLD };
enum class Head { Softmax, Sigmoid };

LossKind loss_kind_from_string(std::string_view s);
std::string to_string(LossKind k);

// CE and KLD pair with a normalized-exponential output, BCE with
// independent per-class sigmoids. The pairing is fixed; gradients are only
// derived for these combinations.
Head head_for(LossKind k);

// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before any log.
inline constexpr double kProbFloor = 1e-12;

// Pairwise (cascade) summation: reduction order independent to well below
// the 1e-10 tolerance the batch reductions promise.
double pairwise_sum(const double* v, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

// Per-entry loss matrix, same shape as the inputs. Targets must lie in
// [0, 1]; predictions must be finite. KLD uses the 0*log(0/x) = 0
// convention.
Matrix elementwise_loss(const Matrix& yt, const Matrix& yp, LossKind kind);

// Plain sum of every entry (pairwise).
double sum_loss(const Matrix& L);

// Scalar expansion of the penalized objective:
//   sum_i sum_j sum_z p[j][z] * L[i][j]
// which algebraically equals sum_i sum_j row_sum_weights(p)[j] * L[i][j].
double penalized_loss(const Matrix& L, const Matrix& p);

// beta * base + alpha * pen.
double total_loss(double base, double pen, double alpha, double beta);

Matrix apply_head(const Matrix& scores, Head head);

// Analytic gradient of
//   beta * sum(L) + alpha * penalized_loss(L, p)
// with respect to the pre-activation scores, where L is the elementwise loss
// of apply_head(scores) against yt. Equals the gradient of the per-class
// weighted loss with weights beta + alpha * row_sum_weights(p)[j]. With no
// penalty matrix the weights are uniformly beta, through the same code path,
// so alpha = 0 or a zero matrix is bitwise inert. Assumes activations stay
// above the clamp floor (true away from |score| ~ 27).
Matrix loss_gradient(const Matrix& yt, const Matrix& scores, LossKind kind,
                     const Matrix* penalty, double alpha, double beta);

}  // namespace serkit
