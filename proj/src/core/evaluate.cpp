#include "serkit/evaluate.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <json.hpp>
#include <sstream>

#include "serkit/aggregate.hpp"
#include "serkit/encodings.hpp"
#include "serkit/errors.hpp"
#include "serkit/losses.hpp"

namespace serkit {

namespace {

using nlohmann::json;

std::vector<std::string> select_ids(const Corpus& c, TestRule r) {
  switch (r) {
    case TestRule::MR: return consensus_split(c, Rule::MR).kept;
    case TestRule::PR: return consensus_split(c, Rule::PR).kept;
    case TestRule::AR: return consensus_split(c, Rule::AR).kept;
    case TestRule::PRnotMR: return donut_split(c, Rule::PR, Rule::MR);
    case TestRule::ARnotPR: return donut_split(c, Rule::AR, Rule::PR);
  }
  throw std::logic_error("unhandled test rule");
}

}  // namespace

TestRule test_rule_from_string(std::string_view s) {
  if (s == "mr") return TestRule::MR;
  if (s == "pr") return TestRule::PR;
  if (s == "ar") return TestRule::AR;
  if (s == "pr-mr") return TestRule::PRnotMR;
  if (s == "ar-pr") return TestRule::ARnotPR;
  throw InputError("unknown test rule '" + std::string(s) +
                   "'; expected mr, pr, ar, pr-mr or ar-pr");
}

std::string to_string(TestRule r) {
  switch (r) {
    case TestRule::MR: return "mr";
    case TestRule::PR: return "pr";
    case TestRule::AR: return "ar";
    case TestRule::PRnotMR: return "pr-mr";
    case TestRule::ARnotPR: return "ar-pr";
  }
  throw std::logic_error("unhandled test rule");
}

bool is_multilabel(TestRule r) {
  return r == TestRule::AR || r == TestRule::ARnotPR;
}

EvalReport evaluate_model(const ModelParams& params, const Corpus& corpus,
                          const FeatureSet& features, const EvalConfig& cfg) {
  const ClassSet& classes = corpus.classes();
  std::size_t C = classes.size();
  if (params.n_out != C)
    throw InputError("model emits " + std::to_string(params.n_out) +
                     " classes but the corpus has " + std::to_string(C));

  EvalReport rep;
  rep.corpus_name = corpus.name();
  rep.rule = cfg.rule;
  rep.multilabel = is_multilabel(cfg.rule);
  rep.head = params.head == Head::Softmax ? "softmax" : "sigmoid";
  if (rep.multilabel) {
    double th = cfg.threshold ? *cfg.threshold
                              : 1.0 / static_cast<double>(C);
    if (!(th > 0.0 && th < 1.0))
      throw InputError("threshold must lie in (0, 1)");
    rep.threshold = th;
  }

  std::map<std::string, std::size_t> feat_row;
  for (std::size_t i = 0; i < features.ids.size(); ++i)
    if (!feat_row.emplace(features.ids[i], i).second)
      throw InputError("duplicate feature row for '" + features.ids[i] + "'");

  // The rule's kept set, minus utterances with no in-set vote: AR keeps
  // those and ar-pr inherits them, but they carry no scorable truth.
  std::vector<const Utterance*> utts;
  std::vector<VoteCount> votes;
  for (const std::string& id : select_ids(corpus, cfg.rule)) {
    const Utterance* u = corpus.find(id);
    VoteCount vc = vote_counts(*u, classes);
    if (vc.total_in_set == 0) {
      ++rep.n_skipped_no_votes;
      continue;
    }
    utts.push_back(u);
    votes.push_back(std::move(vc));
  }
  rep.n_test = utts.size();
  if (utts.empty()) {
    rep.empty_test_set = true;
    return rep;
  }

  Matrix x(utts.size(), params.d_in);
  for (std::size_t i = 0; i < utts.size(); ++i) {
    auto it = feat_row.find(utts[i]->id);
    if (it == feat_row.end())
      throw InputError("no feature row for test utterance '" + utts[i]->id +
                       "'");
    if (features.values.cols() != params.d_in)
      throw InputError("feature dimension " +
                       std::to_string(features.values.cols()) +
                       " does not match the model input " +
                       std::to_string(params.d_in));
    for (std::size_t j = 0; j < params.d_in; ++j)
      x.at(i, j) = features.values.at(it->second, j);
    rep.ids.push_back(utts[i]->id);
  }
  Matrix yp = predict(params, x);

  if (!rep.multilabel) {
    Rule outer = cfg.rule == TestRule::MR ? Rule::MR : Rule::PR;
    std::vector<int> truth_idx;
    for (const VoteCount& vc : votes) {
      ConsensusOutcome o =
          outer == Rule::MR ? aggregate_mr(vc) : aggregate_pr(vc);
      truth_idx.push_back(o.class_index);  // kept by construction
    }
    std::vector<int> pred_idx = argmax_indices(yp);
    Matrix t_onehot = onehot_rows(truth_idx, C);
    rep.f1 = f1_scores(t_onehot, onehot_rows(pred_idx, C));
    rep.rates = uar_uap(truth_idx, pred_idx, C);
    for (std::size_t i = 0; i < truth_idx.size(); ++i)
      rep.item_score.push_back(truth_idx[i] == pred_idx[i] ? 1.0 : 0.0);
    if (params.head == Head::Softmax) {
      rep.item_kld = kld_per_sample(t_onehot, yp);
      rep.kld = kld_eval(t_onehot, yp);
    }
  } else {
    Matrix t_frac(votes.size(), C);
    for (std::size_t i = 0; i < votes.size(); ++i) {
      LabelVector lv = fraction_distribution(votes[i]);
      for (std::size_t j = 0; j < C; ++j) t_frac.at(i, j) = lv.values[j];
    }
    Matrix t_bin = binarize(t_frac, rep.threshold);
    rep.f1 = f1_scores(t_bin, binarize(yp, rep.threshold));
    rep.ml = multilabel_metrics(t_bin, yp);
    // Per-row slice of ml->hamming: same truth cut, 0.5-binarized scores.
    Matrix p_half = binarize(yp, 0.5);
    for (std::size_t i = 0; i < votes.size(); ++i) {
      double wrong = 0.0;
      for (std::size_t j = 0; j < C; ++j)
        if (t_bin.at(i, j) != p_half.at(i, j)) wrong += 1.0;
      rep.item_score.push_back(wrong / static_cast<double>(C));
    }
    if (params.head == Head::Softmax) {
      rep.item_kld = kld_per_sample(t_frac, yp);
      rep.kld = kld_eval(t_frac, yp);
    }
  }
  return rep;
}

std::string EvalReport::to_json() const {
  json j{{"corpus", corpus_name},
         {"rule", to_string(rule)},
         {"multilabel", multilabel},
         {"head", head},
         {"n_test", n_test},
         {"skipped_no_votes", n_skipped_no_votes},
         {"empty_test_set", empty_test_set}};
  if (multilabel) j["threshold"] = threshold;
  if (!empty_test_set) {
    j["f1"] = {{"macro", f1.macro}, {"micro", f1.micro},
               {"weighted", f1.weighted}};
    if (rates) {
      j["uar"] = rates->uar;
      j["uap"] = rates->uap;
    }
    if (ml) {
      j["hamming"] = ml->hamming;
      j["ranking_loss"] = ml->ranking_loss;
      j["coverage"] = ml->coverage;
      j["skipped_rows"] = ml->skipped_rows;
    }
    if (kld) j["kld"] = *kld;
    j["ids"] = ids;
    j[multilabel ? "item_hamming" : "item_correct"] = item_score;
    if (kld) j["item_kld"] = item_kld;
  }
  return j.dump(2) + "\n";
}

EvalReport EvalReport::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("eval report is not valid JSON: ") + e.what());
  }
  EvalReport r;
  try {
    r.corpus_name = j.at("corpus").get<std::string>();
    r.rule = test_rule_from_string(j.at("rule").get<std::string>());
    r.multilabel = j.at("multilabel").get<bool>();
    r.head = j.at("head").get<std::string>();
    r.n_test = j.at("n_test").get<std::size_t>();
    r.n_skipped_no_votes = j.at("skipped_no_votes").get<std::size_t>();
    r.empty_test_set = j.at("empty_test_set").get<bool>();
    if (r.multilabel) r.threshold = j.at("threshold").get<double>();
    if (!r.empty_test_set) {
      r.f1.macro = j.at("f1").at("macro").get<double>();
      r.f1.micro = j.at("f1").at("micro").get<double>();
      r.f1.weighted = j.at("f1").at("weighted").get<double>();
      if (j.contains("uar"))
        r.rates = UarUap{j.at("uar").get<double>(), j.at("uap").get<double>()};
      if (j.contains("hamming"))
        r.ml = MultilabelMetrics{j.at("hamming").get<double>(),
                                 j.at("ranking_loss").get<double>(),
                                 j.at("coverage").get<double>(),
                                 j.at("skipped_rows").get<std::size_t>()};
      if (j.contains("kld")) r.kld = j.at("kld").get<double>();
      r.ids = j.at("ids").get<std::vector<std::string>>();
      r.item_score = j.at(r.multilabel ? "item_hamming" : "item_correct")
                         .get<std::vector<double>>();
      if (j.contains("item_kld"))
        r.item_kld = j.at("item_kld").get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("eval report malformed: ") + e.what());
  }
  return r;
}

std::string render_eval_table(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw InputError("eval table: no reports");
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  std::size_t name_w = std::string("Corpus").size();
  for (const auto& r : reports)
    name_w = std::max(name_w, std::max<std::size_t>(r.corpus_name.size(), 9));

  std::ostringstream out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  const std::size_t col = 10;
  pad("Corpus", name_w + 2);
  pad("Test", 8);
  pad("N", 7);
  for (const char* h : {"MacroF1", "MicroF1", "WeightF1", "UAR", "UAP",
                        "Hamming", "RankLoss", "Coverage", "KLD"})
    pad(h, col);
  out << '\n';
  for (const auto& r : reports) {
    pad(r.corpus_name.empty() ? "(unnamed)" : r.corpus_name, name_w + 2);
    pad(to_string(r.rule), 8);
    pad(std::to_string(r.n_test), 7);
    if (r.empty_test_set) {
      for (int k = 0; k < 9; ++k) pad("-", col);
    } else {
      pad(num(r.f1.macro), col);
      pad(num(r.f1.micro), col);
      pad(num(r.f1.weighted), col);
      pad(r.rates ? num(r.rates->uar) : "-", col);
      pad(r.rates ? num(r.rates->uap) : "-", col);
      pad(r.ml ? num(r.ml->hamming) : "-", col);
      pad(r.ml ? num(r.ml->ranking_loss) : "-", col);
      pad(r.ml ? num(r.ml->coverage) : "-", col);
      pad(r.kld ? num(*r.kld) : "-", col);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace serkit
