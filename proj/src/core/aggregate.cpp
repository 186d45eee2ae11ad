#include "serkit/aggregate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "serkit/io.hpp"
#include "serkit/rng.hpp"

namespace serkit {

namespace {

std::vector<int> argmax_set(const VoteCount& vc) {
  std::int64_t best = 0;
  for (auto c : vc.counts) best = std::max(best, c);
  std::vector<int> out;
  if (best == 0) return out;
  for (std::size_t i = 0; i < vc.counts.size(); ++i)
    if (vc.counts[i] == best) out.push_back(static_cast<int>(i));
  return out;
}

void require_votes(const VoteCount& vc, const char* rule) {
  if (vc.counts.empty())
    throw InputError(std::string(rule) + ": empty vote vector");
  if (vc.total_in_set < 1)
    throw InputError(std::string(rule) + ": no in-set votes");
}

}  // namespace

Rule rule_from_string(std::string_view s) {
  if (s == "mr" || s == "MR") return Rule::MR;
  if (s == "pr" || s == "PR") return Rule::PR;
  if (s == "ar" || s == "AR") return Rule::AR;
  throw InputError("unknown rule '" + std::string(s) +
                   "' (expected mr, pr, or ar)");
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::MR: return "mr";
    case Rule::PR: return "pr";
    case Rule::AR: return "ar";
  }
  return "?";
}

ConsensusOutcome aggregate_mr(const VoteCount& vc) {
  require_votes(vc, "mr");
  ConsensusOutcome out{Rule::MR, false, -1, argmax_set(vc)};
  for (std::size_t i = 0; i < vc.counts.size(); ++i)
    if (vc.counts[i] * 2 > vc.total_in_set) {
      out.kept = true;
      out.class_index = static_cast<int>(i);
      break;
    }
  return out;
}

ConsensusOutcome aggregate_pr(const VoteCount& vc) {
  require_votes(vc, "pr");
  ConsensusOutcome out{Rule::PR, false, -1, argmax_set(vc)};
  if (out.tie_set.size() == 1) {
    out.kept = true;
    out.class_index = out.tie_set[0];
  }
  return out;
}

ConsensusOutcome aggregate_ar_hard(const VoteCount& vc, std::uint64_t seed,
                                   std::string_view utterance_id) {
  require_votes(vc, "ar");
  ConsensusOutcome out{Rule::AR, true, -1, argmax_set(vc)};
  if (out.tie_set.size() == 1) {
    out.class_index = out.tie_set[0];
  } else {
    Rng rng(seed ^ fnv1a64(utterance_id));
    out.class_index =
        out.tie_set[static_cast<std::size_t>(rng.below(out.tie_set.size()))];
  }
  return out;
}

SplitResult consensus_split(const Corpus& c, Rule rule) {
  SplitResult out;
  for (const auto& u : c.utterances()) {
    VoteCount vc = vote_counts(u, c.classes());
    bool kept;
    if (rule == Rule::AR) {
      kept = true;
    } else if (vc.total_in_set < 1) {
      kept = false;
    } else if (rule == Rule::MR) {
      kept = aggregate_mr(vc).kept;
    } else {
      kept = aggregate_pr(vc).kept;
    }
    (kept ? out.kept : out.dropped).push_back(u.id);
  }
  return out;
}

std::vector<std::string> donut(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  std::set<std::string> drop(b.begin(), b.end());
  std::vector<std::string> out;
  for (const auto& id : a)
    if (!drop.count(id)) out.push_back(id);
  return out;
}

std::vector<std::string> donut_split(const Corpus& c, Rule outer, Rule inner) {
  return donut(consensus_split(c, outer).kept, consensus_split(c, inner).kept);
}

LossReport loss_report(const Corpus& c, Rule rule) {
  if (c.size() == 0) throw InputError("loss report: empty corpus");
  LossReport rep;
  rep.corpus_name = c.name();
  rep.rule = rule;
  rep.n_utterances = static_cast<std::int64_t>(c.size());
  for (const auto& u : c.utterances()) {
    VoteCount vc = vote_counts(u, c.classes());
    rep.n_ratings += vc.total_all;
    bool kept;
    std::int64_t consensus_votes = 0;
    if (rule == Rule::AR) {
      kept = true;
      consensus_votes = vc.total_in_set;  // every in-set vote feeds the label
    } else if (vc.total_in_set < 1) {
      kept = false;
    } else {
      ConsensusOutcome o =
          rule == Rule::MR ? aggregate_mr(vc) : aggregate_pr(vc);
      kept = o.kept;
      if (kept)
        consensus_votes = vc.counts[static_cast<std::size_t>(o.class_index)];
    }
    if (!kept) {
      ++rep.n_dropped;
      rep.n_lost_ratings += vc.total_all;
    } else {
      rep.n_lost_ratings += vc.total_all - consensus_votes;
    }
  }
  rep.data_loss = static_cast<double>(rep.n_dropped) /
                  static_cast<double>(rep.n_utterances);
  rep.rating_loss = rep.n_ratings == 0
                        ? 0.0
                        : static_cast<double>(rep.n_lost_ratings) /
                              static_cast<double>(rep.n_ratings);
  return rep;
}

std::string LossReport::to_json() const {
  nlohmann::json j;
  j["corpus"] = corpus_name;
  j["rule"] = serkit::to_string(rule);
  j["n_utterances"] = n_utterances;
  j["n_dropped"] = n_dropped;
  j["n_ratings"] = n_ratings;
  j["n_lost_ratings"] = n_lost_ratings;
  j["data_loss"] = data_loss;
  j["rating_loss"] = rating_loss;
  return j.dump(2) + "\n";
}

LossReport LossReport::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("loss report: bad JSON: ") + e.what());
  }
  try {
    LossReport r;
    r.corpus_name = j.at("corpus").get<std::string>();
    r.rule = rule_from_string(j.at("rule").get<std::string>());
    r.n_utterances = j.at("n_utterances").get<std::int64_t>();
    r.n_dropped = j.at("n_dropped").get<std::int64_t>();
    r.n_ratings = j.at("n_ratings").get<std::int64_t>();
    r.n_lost_ratings = j.at("n_lost_ratings").get<std::int64_t>();
    r.data_loss = j.at("data_loss").get<double>();
    r.rating_loss = j.at("rating_loss").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("loss report: missing field: ") + e.what());
  }
}

std::string render_loss_table(const std::vector<LossReport>& reports) {
  if (reports.empty()) throw InputError("loss table: no reports");
  // Rows keyed by corpus, a Data/Rating column pair per rule present.
  std::vector<std::string> corpora;
  std::vector<Rule> rules;
  std::map<std::pair<std::string, Rule>, const LossReport*> cell;
  for (const auto& r : reports) {
    if (std::find(corpora.begin(), corpora.end(), r.corpus_name) == corpora.end())
      corpora.push_back(r.corpus_name);
    if (std::find(rules.begin(), rules.end(), r.rule) == rules.end())
      rules.push_back(r.rule);
    cell[{r.corpus_name, r.rule}] = &r;
  }
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
    return std::string(buf);
  };
  std::size_t name_w = std::string("Corpus").size();
  for (const auto& n : corpora) name_w = std::max(name_w, n.size());

  std::ostringstream out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  const std::size_t col_w = 10;
  pad("Corpus", name_w + 2);
  for (Rule r : rules) {
    std::string label = to_string(r);
    for (char& ch : label) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    pad(label + " Data", col_w);
    pad(label + " Rating", col_w + 2);
  }
  out << '\n';
  for (const auto& name : corpora) {
    pad(name.empty() ? "(unnamed)" : name, name_w + 2);
    for (Rule r : rules) {
      auto it = cell.find({name, r});
      if (it == cell.end()) {
        pad("-", col_w);
        pad("-", col_w + 2);
      } else {
        pad(pct(it->second->data_loss), col_w);
        pad(pct(it->second->rating_loss), col_w + 2);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace serkit
