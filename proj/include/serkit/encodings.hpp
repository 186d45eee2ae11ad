#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "serkit/aggregate.hpp"
#include "serkit/corpus.hpp"
#include "serkit/io.hpp"

namespace serkit {

enum class LabelKind { Hard, Fraction, AlphaSoft, MultiHot };

LabelKind label_kind_from_string(std::string_view s);
std::string to_string(LabelKind k);

struct LabelVector {
  LabelKind kind;
  bool smoothed = false;
  std::vector<double> values;  // class-set order
};

// Zero entries of multi-hot vectors are raised to this floor so log-based
// losses stay finite.
inline constexpr double kMultiHotFloor = 1e-6;

// One-hot under the rule's consensus; nullopt when the rule drops the
// utterance. AR resolves argmax ties by the seeded per-utterance draw.
std::optional<LabelVector> hard_onehot(const VoteCount& vc, Rule rule,
                                       std::uint64_t seed,
                                       std::string_view utterance_id);

// counts[i] / total_in_set. Errors when there are no in-set votes.
LabelVector fraction_distribution(const VoteCount& vc);

// (alpha + counts[i]) / (alpha * C + total_in_set). alpha = 0 reduces to the
// fraction distribution; alpha must be nonnegative and there must be at
// least one in-set vote.
LabelVector alpha_soft(const VoteCount& vc, double alpha);

// (1 - eps) * v + eps / C. Only defined for simplex-shaped labels; multi-hot
// input is an error. eps in [0, 1).
LabelVector smooth(const LabelVector& v, double eps);

// 1 for every class with at least one vote, kMultiHotFloor elsewhere.
LabelVector multi_hot(const VoteCount& vc);

// Encodes a whole corpus into a label table. Utterances the rule drops are
// omitted; utterances with no in-set votes cannot be encoded by any kind and
// are skipped (counted separately).
struct EncodeResult {
  ValueTable table;
  std::vector<std::string> dropped_by_rule;
  std::vector<std::string> skipped_no_votes;
};

struct EncodeSpec {
  LabelKind kind = LabelKind::Fraction;
  std::optional<Rule> rule;      // required iff kind == Hard
  double alpha = 0.75;           // alpha-soft only
  double smooth_eps = 0.0;       // 0 = no smoothing
  std::uint64_t seed = 0;        // AR hard-label tie draws
};

EncodeResult encode_corpus(const Corpus& c, const EncodeSpec& spec);

}  // namespace serkit
