#include "serkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "serkit/errors.hpp"
#include "serkit/io.hpp"
#include "serkit/rng.hpp"

namespace serkit {

namespace {

using nlohmann::json;

void validate(const SynthConfig& cfg) {
  ClassSet classes(cfg.classes);  // validates size and uniqueness
  std::size_t C = classes.size();
  if (cfg.n_utterances < 1) throw InputError("synth: n_utterances must be >= 1");
  if (cfg.n_sessions < 1) throw InputError("synth: n_sessions must be >= 1");
  if (!cfg.prior.empty()) {
    if (cfg.prior.size() != C)
      throw InputError("synth: prior length does not match the class count");
    double sum = 0.0;
    for (double p : cfg.prior) {
      if (p < 0.0) throw InputError("synth: negative prior entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw InputError("synth: prior sums to " + format_double(sum) +
                       ", expected 1");
  }
  if (cfg.raters.empty()) throw InputError("synth: no rater profiles");
  for (const RaterProfile& r : cfg.raters) {
    if (r.rater_id.empty()) throw InputError("synth: rater with empty id");
    if (r.confusion.rows() != C || r.confusion.cols() != C)
      throw InputError("synth: confusion matrix for '" + r.rater_id +
                       "' is not " + std::to_string(C) + "x" +
                       std::to_string(C));
    for (std::size_t i = 0; i < C; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < C; ++j) {
        if (r.confusion.at(i, j) < 0.0)
          throw InputError("synth: negative confusion entry for '" +
                           r.rater_id + "'");
        sum += r.confusion.at(i, j);
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw InputError("synth: confusion row " + std::to_string(i) +
                         " for '" + r.rater_id + "' sums to " +
                         format_double(sum));
    }
    if (!(r.coverage > 0.0 && r.coverage <= 1.0))
      throw InputError("synth: coverage for '" + r.rater_id +
                       "' must lie in (0, 1]");
  }
  if (cfg.ambiguity) {
    const AmbiguityConfig& a = *cfg.ambiguity;
    if (a.fraction < 0.0 || a.fraction > 1.0)
      throw InputError("synth: ambiguity fraction must lie in [0, 1]");
    if (!(a.weight > 0.0 && a.weight < 1.0))
      throw InputError("synth: mixture weight must lie in (0, 1)");
    if (a.fraction > 0.0 && a.pairs.empty())
      throw InputError("synth: ambiguity enabled without class pairs");
    for (auto [x, y] : a.pairs)
      if (x >= C || y >= C || x == y)
        throw InputError("synth: bad ambiguity pair (" + std::to_string(x) +
                         ", " + std::to_string(y) + ")");
  }
  if (cfg.features.dimension < 1)
    throw InputError("synth: feature dimension must be >= 1");
  if (cfg.features.stddev < 0.0)
    throw InputError("synth: feature stddev must be >= 0");
  if (cfg.features.means &&
      (cfg.features.means->rows() != C ||
       cfg.features.means->cols() != cfg.features.dimension))
    throw InputError("synth: explicit means must be " + std::to_string(C) +
                     "x" + std::to_string(cfg.features.dimension));
}

Matrix resolve_means(const SynthConfig& cfg, std::size_t C, Rng& rng) {
  if (cfg.features.means) return *cfg.features.means;
  std::size_t d = cfg.features.dimension;
  Matrix m(C, d, 0.0);
  if (C <= d) {
    for (std::size_t c = 0; c < C; ++c)
      m.at(c, c) = cfg.features.separation;
    return m;
  }
  for (std::size_t c = 0; c < C; ++c) {
    double norm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      m.at(c, j) = rng.gaussian();
      norm += m.at(c, j) * m.at(c, j);
    }
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < d; ++j)
      m.at(c, j) = m.at(c, j) / norm * cfg.features.separation;
  }
  return m;
}

}  // namespace

Matrix accuracy_confusion(std::size_t n_classes, double accuracy) {
  if (n_classes < 2) throw InputError("confusion needs at least 2 classes");
  if (!(accuracy >= 0.0 && accuracy <= 1.0))
    throw InputError("accuracy must lie in [0, 1]");
  double off = (1.0 - accuracy) / static_cast<double>(n_classes - 1);
  Matrix m(n_classes, n_classes, off);
  for (std::size_t i = 0; i < n_classes; ++i) m.at(i, i) = accuracy;
  return m;
}

SynthResult generate(const SynthConfig& cfg) {
  validate(cfg);
  ClassSet classes(cfg.classes);
  std::size_t C = classes.size(), d = cfg.features.dimension;
  std::vector<double> prior = cfg.prior;
  if (prior.empty()) prior.assign(C, 1.0 / static_cast<double>(C));

  Rng rng(cfg.seed);
  Matrix means = resolve_means(cfg, C, rng);

  std::size_t width = std::to_string(cfg.n_utterances).size();
  std::vector<Utterance> utterances;
  FeatureSet features;
  features.values = Matrix(cfg.n_utterances, d);
  TruthTable truth;
  std::size_t n_unrated = 0;

  for (std::size_t i = 0; i < cfg.n_utterances; ++i) {
    std::string num = std::to_string(i + 1);
    std::string id = "u" + std::string(width - num.size(), '0') + num;
    std::size_t session = i % cfg.n_sessions + 1;

    // Truth: mixture draw first when ambiguity is on, then the class draw.
    TruthEntry entry;
    std::size_t class_a, class_b = 0;
    bool mixture = false;
    if (cfg.ambiguity && cfg.ambiguity->fraction > 0.0 &&
        rng.uniform() < cfg.ambiguity->fraction) {
      mixture = true;
      auto [x, y] = cfg.ambiguity->pairs[rng.below(cfg.ambiguity->pairs.size())];
      class_a = x;
      class_b = y;
      entry = {classes.name(x), classes.name(y), cfg.ambiguity->weight};
    } else {
      class_a = rng.weighted(prior);
      entry = {classes.name(class_a), "", 1.0};
    }
    truth[id] = entry;

    double w = mixture ? cfg.ambiguity->weight : 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      double mu = w * means.at(class_a, j) +
                  (mixture ? (1.0 - w) * means.at(class_b, j) : 0.0);
      features.values.at(i, j) = mu + cfg.features.stddev * rng.gaussian();
    }
    features.ids.push_back(id);

    Utterance u;
    u.id = id;
    u.session = "Ses." + std::to_string(session);
    u.speaker = "spk" + std::to_string(session);
    for (const RaterProfile& r : cfg.raters) {
      if (rng.uniform() >= r.coverage) continue;
      std::size_t component = class_a;
      if (mixture && rng.uniform() >= w) component = class_b;
      std::size_t emitted = rng.weighted(r.confusion.row(component));
      u.ratings.push_back({r.rater_id, classes.name(emitted), -1});
    }
    if (u.ratings.empty()) {
      ++n_unrated;  // no one rated it; it never reaches the corpus
      continue;
    }
    utterances.push_back(std::move(u));
  }

  if (utterances.empty())
    throw InputError("synth: no utterance received any rating");
  return SynthResult{Corpus(classes, std::move(utterances), cfg.name),
                     std::move(features), std::move(truth), n_unrated};
}

SynthCheckReport empirical_check(const SynthResult& result,
                                 const SynthConfig& cfg) {
  validate(cfg);
  ClassSet classes(cfg.classes);
  std::size_t C = classes.size();
  std::vector<double> prior = cfg.prior;
  if (prior.empty()) prior.assign(C, 1.0 / static_cast<double>(C));

  SynthCheckReport report;
  report.ok = true;
  auto settle = [&report](bool ok, bool skipped) {
    if (!skipped && !ok) report.ok = false;
  };

  // Group in-corpus emissions by (rater, pure true class).
  std::map<std::pair<std::string, std::size_t>, std::vector<std::size_t>>
      groups;  // -> per-class emission counts
  std::map<std::string, std::size_t> rated_by;
  for (const RaterProfile& r : cfg.raters) rated_by[r.rater_id] = 0;
  for (const Utterance& u : result.corpus.utterances()) {
    auto it = result.truth.find(u.id);
    if (it == result.truth.end())
      throw InputError("empirical check: utterance '" + u.id +
                       "' missing from the truth table");
    const TruthEntry& t = it->second;
    for (const Rating& rate : u.ratings) {
      ++rated_by[rate.rater_id];
      if (t.is_mixture()) continue;  // emission class is hidden for mixtures
      int truth_idx = classes.index_of(t.class_a);
      int emit_idx = classes.index_of(rate.class_name);
      if (truth_idx < 0 || emit_idx < 0)
        throw InputError("empirical check: class outside the configured set");
      auto& counts = groups[{rate.rater_id, static_cast<std::size_t>(truth_idx)}];
      counts.resize(C, 0);
      ++counts[static_cast<std::size_t>(emit_idx)];
    }
  }
  for (const auto& [id, t] : result.truth)
    if (t.is_mixture()) ++report.n_mixture;

  for (const RaterProfile& r : cfg.raters) {
    for (std::size_t c = 0; c < C; ++c) {
      auto it = groups.find({r.rater_id, c});
      EmissionCheck e;
      e.rater_id = r.rater_id;
      e.class_name = classes.name(c);
      if (it != groups.end()) {
        const auto& counts = it->second;
        double n = 0;
        for (std::size_t k : counts) n += static_cast<double>(k);
        e.n = static_cast<std::size_t>(n);
        double tv = 0.0;
        for (std::size_t j = 0; j < C; ++j)
          tv += std::abs(static_cast<double>(counts[j]) / n - r.confusion.at(c, j));
        e.tv = tv / 2.0;
        e.bound = 3.0 / std::sqrt(n);
      }
      e.skipped = e.n == 0 || e.bound >= 1.0;  // vacuous at tiny group sizes
      e.ok = !e.skipped && e.tv <= e.bound;
      settle(e.ok, e.skipped);
      report.emissions.push_back(e);
    }

    CoverageCheck cov;
    cov.rater_id = r.rater_id;
    cov.rated = rated_by[r.rater_id];
    double n = static_cast<double>(cfg.n_utterances);
    cov.expected = r.coverage * n;
    cov.bound = 3.0 * std::sqrt(n);
    cov.skipped = cov.bound >= n;
    cov.ok = !cov.skipped &&
             std::abs(static_cast<double>(cov.rated) - cov.expected) <= cov.bound;
    settle(cov.ok, cov.skipped);
    report.coverage.push_back(cov);
  }

  // Pure-truth class frequencies against the prior.
  std::vector<double> pure_counts(C, 0.0);
  double n_pure = 0.0;
  for (const auto& [id, t] : result.truth) {
    if (t.is_mixture()) continue;
    int idx = classes.index_of(t.class_a);
    if (idx < 0) throw InputError("empirical check: unknown truth class");
    pure_counts[static_cast<std::size_t>(idx)] += 1.0;
    n_pure += 1.0;
  }
  if (n_pure > 0.0) {
    double tv = 0.0;
    for (std::size_t c = 0; c < C; ++c)
      tv += std::abs(pure_counts[c] / n_pure - prior[c]);
    report.prior_tv = tv / 2.0;
    report.prior_bound = 3.0 / std::sqrt(n_pure);
  }
  report.prior_skipped = n_pure == 0.0 || report.prior_bound >= 1.0;
  report.prior_ok = !report.prior_skipped && report.prior_tv <= report.prior_bound;
  settle(report.prior_ok, report.prior_skipped);
  return report;
}

namespace {

json entry_to_json(const TruthEntry& t) {
  if (!t.is_mixture()) return json{{"class", t.class_a}};
  return json{{"mix", {t.class_a, t.class_b}}, {"weight", t.weight}};
}

}  // namespace

std::string truth_to_json(const TruthTable& t) {
  json j = json::object();
  for (const auto& [id, entry] : t) j[id] = entry_to_json(entry);
  return j.dump(2) + "\n";
}

TruthTable truth_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("truth file is not valid JSON: ") + e.what());
  }
  TruthTable out;
  try {
    for (auto& [id, v] : j.items()) {
      TruthEntry e;
      if (v.contains("class")) {
        e.class_a = v.at("class").get<std::string>();
      } else {
        auto mix = v.at("mix").get<std::vector<std::string>>();
        if (mix.size() != 2)
          throw InputError("truth entry '" + id + "': mix needs 2 classes");
        e.class_a = mix[0];
        e.class_b = mix[1];
        e.weight = v.at("weight").get<double>();
      }
      out[id] = e;
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("truth file malformed: ") + e.what());
  }
  return out;
}

SynthConfig synth_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("synth config is not valid JSON: ") + e.what());
  }
  SynthConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    cfg.classes = j.at("classes").get<std::vector<std::string>>();
    cfg.n_utterances = j.at("n_utterances").get<std::size_t>();
    cfg.prior = j.value("prior", std::vector<double>{});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.n_sessions = j.value("n_sessions", std::size_t{5});
    std::size_t C = cfg.classes.size();
    for (const json& r : j.at("raters")) {
      RaterProfile p;
      p.rater_id = r.at("rater_id").get<std::string>();
      p.coverage = r.value("coverage", 1.0);
      if (r.contains("confusion")) {
        auto rows = r.at("confusion").get<std::vector<std::vector<double>>>();
        Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != m.cols())
            throw InputError("synth config: ragged confusion matrix for '" +
                             p.rater_id + "'");
          for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) = rows[i][k];
        }
        p.confusion = m;
      } else {
        p.confusion = accuracy_confusion(C, r.at("accuracy").get<double>());
      }
      cfg.raters.push_back(std::move(p));
    }
    if (j.contains("ambiguity")) {
      const json& a = j.at("ambiguity");
      AmbiguityConfig amb;
      amb.fraction = a.at("fraction").get<double>();
      amb.weight = a.value("weight", 0.5);
      for (const json& pr : a.at("pairs")) {
        auto pair = pr.get<std::vector<std::size_t>>();
        if (pair.size() != 2)
          throw InputError("synth config: ambiguity pair needs 2 indices");
        amb.pairs.emplace_back(pair[0], pair[1]);
      }
      cfg.ambiguity = std::move(amb);
    }
    if (j.contains("features")) {
      const json& f = j.at("features");
      cfg.features.dimension = f.value("dimension", std::size_t{8});
      cfg.features.separation = f.value("separation", 2.5);
      cfg.features.stddev = f.value("stddev", 1.0);
      if (f.contains("means")) {
        auto rows = f.at("means").get<std::vector<std::vector<double>>>();
        Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != m.cols())
            throw InputError("synth config: ragged means matrix");
          for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) = rows[i][k];
        }
        cfg.features.means = m;
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("synth config malformed: ") + e.what());
  }
  return cfg;
}

std::string check_report_to_json(const SynthCheckReport& r) {
  json emissions = json::array();
  for (const EmissionCheck& e : r.emissions)
    emissions.push_back({{"rater_id", e.rater_id},
                         {"class", e.class_name},
                         {"n", e.n},
                         {"tv", e.tv},
                         {"bound", e.bound},
                         {"skipped", e.skipped},
                         {"ok", e.ok}});
  json coverage = json::array();
  for (const CoverageCheck& c : r.coverage)
    coverage.push_back({{"rater_id", c.rater_id},
                        {"rated", c.rated},
                        {"expected", c.expected},
                        {"bound", c.bound},
                        {"skipped", c.skipped},
                        {"ok", c.ok}});
  json j{{"emissions", emissions},
         {"coverage", coverage},
         {"prior_tv", r.prior_tv},
         {"prior_bound", r.prior_bound},
         {"prior_skipped", r.prior_skipped},
         {"prior_ok", r.prior_ok},
         {"n_mixture", r.n_mixture},
         {"ok", r.ok}};
  return j.dump(2) + "\n";
}

}  // namespace serkit
