#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "serkit/corpus.hpp"

namespace serkit {

// Consensus rules. MR keeps an utterance only when one class holds a strict
// majority of the in-set votes; PR when one class holds a unique plurality;
// AR keeps every utterance.
enum class Rule { MR, PR, AR };

Rule rule_from_string(std::string_view s);
std::string to_string(Rule r);

struct ConsensusOutcome {
  Rule rule;
  bool kept = false;
  int class_index = -1;       // consensus / hard-label class when kept
  std::vector<int> tie_set;   // argmax classes, ascending
};

// Strict majority: count * 2 > total_in_set. Errors on a vote vector with no
// in-set votes.
ConsensusOutcome aggregate_mr(const VoteCount& vc);

// Unique plurality: kept only when the argmax is a single class.
ConsensusOutcome aggregate_pr(const VoteCount& vc);

// Always kept; the hard label is the argmax, with ties broken by a draw that
// is a pure function of (seed, utterance_id), independent of corpus order.
ConsensusOutcome aggregate_ar_hard(const VoteCount& vc, std::uint64_t seed,
                                   std::string_view utterance_id);

struct SplitResult {
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
};

// Applies a rule across the corpus. Utterances without any in-set vote are
// dropped by MR/PR and kept by AR (AR's data loss is identically zero);
// their label encodings are handled separately.
SplitResult consensus_split(const Corpus& c, Rule rule);

// Order-preserving set difference a \ b.
std::vector<std::string> donut(const std::vector<std::string>& a,
                               const std::vector<std::string>& b);

// kept(outer) \ kept(inner), e.g. (PR, MR) or (AR, PR).
std::vector<std::string> donut_split(const Corpus& c, Rule outer, Rule inner);

// Data loss counts dropped utterances; rating loss counts every rating that
// does not survive into the final label: all ratings of dropped utterances,
// in-set votes for other classes on MR/PR-kept utterances, and out-of-set
// votes everywhere.
struct LossReport {
  std::string corpus_name;
  Rule rule = Rule::MR;
  std::int64_t n_utterances = 0;
  std::int64_t n_dropped = 0;
  std::int64_t n_ratings = 0;
  std::int64_t n_lost_ratings = 0;
  double data_loss = 0.0;
  double rating_loss = 0.0;

  std::string to_json() const;
  static LossReport from_json(const std::string& text);
};

LossReport loss_report(const Corpus& c, Rule rule);

// Aligned text table, one row per corpus, a Data/Rating column pair per rule
// present in the reports.
std::string render_loss_table(const std::vector<LossReport>& reports);

}  // namespace serkit
