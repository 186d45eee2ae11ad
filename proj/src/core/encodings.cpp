#include "serkit/encodings.hpp"

namespace serkit {

LabelKind label_kind_from_string(std::string_view s) {
  if (s == "hard") return LabelKind::Hard;
  if (s == "fraction") return LabelKind::Fraction;
  if (s == "alpha-soft") return LabelKind::AlphaSoft;
  if (s == "multi-hot") return LabelKind::MultiHot;
  throw InputError("unknown label kind '" + std::string(s) +
                   "' (expected hard, fraction, alpha-soft, or multi-hot)");
}

std::string to_string(LabelKind k) {
  switch (k) {
    case LabelKind::Hard: return "hard";
    case LabelKind::Fraction: return "fraction";
    case LabelKind::AlphaSoft: return "alpha-soft";
    case LabelKind::MultiHot: return "multi-hot";
  }
  return "?";
}

std::optional<LabelVector> hard_onehot(const VoteCount& vc, Rule rule,
                                       std::uint64_t seed,
                                       std::string_view utterance_id) {
  ConsensusOutcome o;
  switch (rule) {
    case Rule::MR: o = aggregate_mr(vc); break;
    case Rule::PR: o = aggregate_pr(vc); break;
    case Rule::AR: o = aggregate_ar_hard(vc, seed, utterance_id); break;
  }
  if (!o.kept) return std::nullopt;
  LabelVector v{LabelKind::Hard, false,
                std::vector<double>(vc.counts.size(), 0.0)};
  v.values[static_cast<std::size_t>(o.class_index)] = 1.0;
  return v;
}

LabelVector fraction_distribution(const VoteCount& vc) {
  if (vc.total_in_set < 1)
    throw InputError("fraction distribution: no in-set votes");
  LabelVector v{LabelKind::Fraction, false, {}};
  v.values.reserve(vc.counts.size());
  for (auto c : vc.counts)
    v.values.push_back(static_cast<double>(c) /
                       static_cast<double>(vc.total_in_set));
  return v;
}

LabelVector alpha_soft(const VoteCount& vc, double alpha) {
  if (alpha < 0.0) throw InputError("alpha-soft: alpha must be nonnegative");
  if (vc.total_in_set < 1) throw InputError("alpha-soft: no in-set votes");
  double denom = alpha * static_cast<double>(vc.counts.size()) +
                 static_cast<double>(vc.total_in_set);
  LabelVector v{LabelKind::AlphaSoft, false, {}};
  v.values.reserve(vc.counts.size());
  for (auto c : vc.counts)
    v.values.push_back((alpha + static_cast<double>(c)) / denom);
  return v;
}

LabelVector smooth(const LabelVector& v, double eps) {
  if (v.kind == LabelKind::MultiHot)
    throw InputError(
        "smoothing is undefined for multi-hot labels (not a distribution)");
  if (eps < 0.0 || eps >= 1.0)
    throw InputError("smoothing eps must be in [0, 1)");
  LabelVector out{v.kind, true, {}};
  double uniform = eps / static_cast<double>(v.values.size());
  out.values.reserve(v.values.size());
  for (double x : v.values) out.values.push_back((1.0 - eps) * x + uniform);
  return out;
}

LabelVector multi_hot(const VoteCount& vc) {
  if (vc.total_in_set < 1) throw InputError("multi-hot: no in-set votes");
  LabelVector v{LabelKind::MultiHot, false, {}};
  v.values.reserve(vc.counts.size());
  for (auto c : vc.counts)
    v.values.push_back(c >= 1 ? 1.0 : kMultiHotFloor);
  return v;
}

EncodeResult encode_corpus(const Corpus& c, const EncodeSpec& spec) {
  if (spec.kind == LabelKind::Hard && !spec.rule)
    throw InputError("hard labels need an aggregation rule");
  if (spec.kind != LabelKind::Hard && spec.rule)
    throw InputError("an aggregation rule only applies to hard labels");
  if (spec.kind == LabelKind::MultiHot && spec.smooth_eps != 0.0)
    throw InputError(
        "smoothing is undefined for multi-hot labels (not a distribution)");

  EncodeResult out;
  out.table.columns = c.classes().names();
  std::vector<double> flat;
  for (const auto& u : c.utterances()) {
    VoteCount vc = vote_counts(u, c.classes());
    if (vc.total_in_set < 1) {
      out.skipped_no_votes.push_back(u.id);
      continue;
    }
    std::optional<LabelVector> v;
    switch (spec.kind) {
      case LabelKind::Hard:
        v = hard_onehot(vc, *spec.rule, spec.seed, u.id);
        break;
      case LabelKind::Fraction: v = fraction_distribution(vc); break;
      case LabelKind::AlphaSoft: v = alpha_soft(vc, spec.alpha); break;
      case LabelKind::MultiHot: v = multi_hot(vc); break;
    }
    if (!v) {
      out.dropped_by_rule.push_back(u.id);
      continue;
    }
    if (spec.smooth_eps != 0.0) v = smooth(*v, spec.smooth_eps);
    out.table.ids.push_back(u.id);
    flat.insert(flat.end(), v->values.begin(), v->values.end());
  }
  out.table.values =
      Matrix(out.table.ids.size(), c.classes().size(), std::move(flat));
  out.table.meta["kind"] = to_string(spec.kind);
  if (spec.rule) out.table.meta["rule"] = to_string(*spec.rule);
  if (spec.kind == LabelKind::AlphaSoft)
    out.table.meta["alpha"] = format_double(spec.alpha);
  if (spec.smooth_eps != 0.0)
    out.table.meta["smooth"] = format_double(spec.smooth_eps);
  if (spec.kind == LabelKind::Hard && *spec.rule == Rule::AR)
    out.table.meta["seed"] = std::to_string(spec.seed);
  return out;
}

}  // namespace serkit
