#include "serkit.h"

#include <cstring>
#include <map>
#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "serkit/aggregate.hpp"
#include "serkit/cooccurrence.hpp"
#include "serkit/corpus.hpp"
#include "serkit/encodings.hpp"
#include "serkit/errors.hpp"
#include "serkit/evaluate.hpp"
#include "serkit/io.hpp"
#include "serkit/losses.hpp"
#include "serkit/metrics.hpp"
#include "serkit/partitions.hpp"
#include "serkit/synth.hpp"
#include "serkit/trainer.hpp"

using nlohmann::json;

struct serkit_corpus {
  serkit::Corpus value;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
serkit_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SERKIT_OK;
  } catch (const serkit::InputError& e) {
    g_last_error = e.what();
    return SERKIT_ERR_INPUT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SERKIT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SERKIT_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw serkit::InputError(std::string("null argument: ") + what);
}

serkit::ClassSet parse_classes(const char* classes_csv) {
  require(classes_csv, "classes");
  return serkit::ClassSet(serkit::split(classes_csv, ','));
}

serkit::CsvSchema parse_schema(const char* schema_json) {
  serkit::CsvSchema schema;
  if (!schema_json || !*schema_json) return schema;
  json j;
  try {
    j = json::parse(schema_json);
  } catch (const json::exception& e) {
    throw serkit::InputError(std::string("schema is not valid JSON: ") +
                             e.what());
  }
  schema.utterance_id = j.value("utterance_id", schema.utterance_id);
  schema.rater_id = j.value("rater_id", schema.rater_id);
  schema.class_name = j.value("class", schema.class_name);
  schema.session = j.value("session", schema.session);
  schema.speaker = j.value("speaker", schema.speaker);
  return schema;
}

serkit::TrainConfig parse_train_config(const char* config_json,
                                       json* echo = nullptr) {
  require(config_json, "config");
  json j;
  try {
    j = json::parse(config_json);
  } catch (const json::exception& e) {
    throw serkit::InputError(std::string("train config is not valid JSON: ") +
                             e.what());
  }
  serkit::TrainConfig cfg;
  try {
    cfg.loss = serkit::loss_kind_from_string(j.at("loss").get<std::string>());
    cfg.alpha = j.value("alpha", 0.0);
    cfg.beta = j.value("beta", 1.0);
    cfg.hidden = j.value("hidden", std::size_t{16});
    cfg.learning_rate = j.value("learning_rate", 0.05);
    cfg.batch_size = j.value("batch_size", std::size_t{32});
    cfg.epochs = j.value("epochs", std::size_t{100});
    cfg.patience = j.value("patience", std::size_t{15});
    cfg.momentum = j.value("momentum", 0.0);
    cfg.dev_fraction = j.value("dev_fraction", 0.1);
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("penalty_path")) {
      std::string path = j.at("penalty_path").get<std::string>();
      std::vector<std::string> labels;
      cfg.penalty =
          serkit::square_matrix_from_csv(serkit::read_file(path), labels);
    }
  } catch (const json::exception& e) {
    throw serkit::InputError(std::string("train config malformed: ") +
                             e.what());
  }
  if (echo) *echo = j;
  return cfg;
}

serkit::EncodeSpec parse_encode_spec(const char* spec_json) {
  require(spec_json, "spec");
  json j;
  try {
    j = json::parse(spec_json);
  } catch (const json::exception& e) {
    throw serkit::InputError(std::string("encode spec is not valid JSON: ") +
                             e.what());
  }
  serkit::EncodeSpec spec;
  try {
    spec.kind =
        serkit::label_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("rule"))
      spec.rule = serkit::rule_from_string(j.at("rule").get<std::string>());
    spec.alpha = j.value("alpha", 0.75);
    spec.smooth_eps = j.value("smooth", 0.0);
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw serkit::InputError(std::string("encode spec malformed: ") + e.what());
  }
  return spec;
}

}  // namespace

extern "C" {

const char* serkit_version(void) { return "0.1.0"; }

const char* serkit_last_error(void) { return g_last_error.c_str(); }

void serkit_string_free(char* s) { delete[] s; }

serkit_status serkit_corpus_load(const char* path, const char* classes_csv,
                                 const char* name, const char* schema_json,
                                 serkit_corpus** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    serkit::Corpus c = serkit::load_annotations(
        path, parse_classes(classes_csv), parse_schema(schema_json),
        name ? name : "");
    *out = new serkit_corpus{std::move(c)};
  });
}

void serkit_corpus_free(serkit_corpus* c) { delete c; }

serkit_status serkit_corpus_save(const serkit_corpus* c, const char* path) {
  return guard([&] {
    require(c, "corpus");
    require(path, "path");
    serkit::save_corpus(c->value, path);
  });
}

serkit_status serkit_corpus_info_json(const serkit_corpus* c,
                                      char** out_json) {
  return guard([&] {
    require(c, "corpus");
    require(out_json, "out");
    const serkit::Corpus& corpus = c->value;
    const serkit::ClassSet& classes = corpus.classes();
    std::vector<std::int64_t> votes(classes.size(), 0);
    std::int64_t n_ratings = 0, out_of_set = 0;
    for (const serkit::Utterance& u : corpus.utterances()) {
      serkit::VoteCount vc = serkit::vote_counts(u, classes);
      for (std::size_t i = 0; i < votes.size(); ++i) votes[i] += vc.counts[i];
      n_ratings += vc.total_all;
      out_of_set += vc.total_all - vc.total_in_set;
    }
    json per_class = json::object();
    for (std::size_t i = 0; i < classes.size(); ++i)
      per_class[classes.name(i)] = votes[i];
    json j{{"name", corpus.name()},
           {"classes", classes.names()},
           {"n_utterances", corpus.size()},
           {"n_ratings", n_ratings},
           {"raters", serkit::rater_ids(corpus)},
           {"votes_per_class", per_class},
           {"out_of_set_votes", out_of_set}};
    *out_json = dup_string(j.dump(2) + "\n");
  });
}

serkit_status serkit_corpus_subsample(const serkit_corpus* c, size_t n,
                                      uint64_t seed, serkit_corpus** out) {
  return guard([&] {
    require(c, "corpus");
    require(out, "out");
    *out = new serkit_corpus{serkit::subsample(c->value, n, seed)};
  });
}

serkit_status serkit_corpus_rater_view(const serkit_corpus* c,
                                       const char* rater_id,
                                       serkit_corpus** out) {
  return guard([&] {
    require(c, "corpus");
    require(rater_id, "rater_id");
    require(out, "out");
    *out = new serkit_corpus{serkit::rater_view(c->value, rater_id)};
  });
}

serkit_status serkit_partition_json(const char* dataset_id, uint64_t seed,
                                    char** out_json) {
  return guard([&] {
    require(dataset_id, "dataset_id");
    require(out_json, "out");
    serkit::PartitionManifest m = serkit::standard_partition(dataset_id, seed);
    m.validate();
    *out_json = dup_string(m.to_json());
  });
}

serkit_status serkit_aggregate_outcomes_csv(const serkit_corpus* c,
                                            const char* rule, uint64_t seed,
                                            char** out_csv) {
  return guard([&] {
    require(c, "corpus");
    require(rule, "rule");
    require(out_csv, "out");
    serkit::Rule r = serkit::rule_from_string(rule);
    const serkit::ClassSet& classes = c->value.classes();
    std::string out = "utterance_id,kept,class,tie_set\n";
    for (const serkit::Utterance& u : c->value.utterances()) {
      serkit::VoteCount vc = serkit::vote_counts(u, classes);
      out += u.id;
      if (vc.total_in_set == 0) {
        // Nothing to aggregate: mr/pr drop the row, ar keeps it unlabeled.
        out += r == serkit::Rule::AR ? ",1,,\n" : ",0,,\n";
        continue;
      }
      serkit::ConsensusOutcome o =
          r == serkit::Rule::MR   ? serkit::aggregate_mr(vc)
          : r == serkit::Rule::PR ? serkit::aggregate_pr(vc)
                                  : serkit::aggregate_ar_hard(vc, seed, u.id);
      out += o.kept ? ",1," : ",0,";
      if (o.kept) out += classes.name(static_cast<std::size_t>(o.class_index));
      out += ',';
      for (std::size_t i = 0; i < o.tie_set.size(); ++i) {
        if (i) out += ';';
        out += classes.name(static_cast<std::size_t>(o.tie_set[i]));
      }
      out += '\n';
    }
    *out_csv = dup_string(out);
  });
}

serkit_status serkit_loss_report_json(const serkit_corpus* c, const char* rule,
                                      char** out_json) {
  return guard([&] {
    require(c, "corpus");
    require(rule, "rule");
    require(out_json, "out");
    *out_json = dup_string(
        serkit::loss_report(c->value, serkit::rule_from_string(rule))
            .to_json());
  });
}

serkit_status serkit_loss_table(const serkit_corpus* c, const char* rules_csv,
                                char** out_table) {
  return guard([&] {
    require(c, "corpus");
    require(rules_csv, "rules");
    require(out_table, "out");
    std::vector<serkit::LossReport> reports;
    for (const std::string& r : serkit::split(rules_csv, ','))
      reports.push_back(
          serkit::loss_report(c->value, serkit::rule_from_string(r)));
    *out_table = dup_string(serkit::render_loss_table(reports));
  });
}

serkit_status serkit_encode_to_file(const serkit_corpus* c,
                                    const char* spec_json,
                                    const char* out_path,
                                    char** out_summary_json) {
  return guard([&] {
    require(c, "corpus");
    require(out_path, "out_path");
    require(out_summary_json, "out");
    serkit::EncodeSpec spec = parse_encode_spec(spec_json);
    serkit::EncodeResult res = serkit::encode_corpus(c->value, spec);
    serkit::write_file_atomic(out_path, serkit::value_table_to_csv(res.table));
    json j{{"encoded", res.table.ids.size()},
           {"dropped_by_rule", res.dropped_by_rule},
           {"skipped_no_votes", res.skipped_no_votes},
           {"path", out_path}};
    *out_summary_json = dup_string(j.dump(2) + "\n");
  });
}

serkit_status serkit_penalty_write(const serkit_corpus* c,
                                   const char* counts_path,
                                   const char* weights_path,
                                   const char* penalty_path) {
  return guard([&] {
    require(c, "corpus");
    require(counts_path, "counts_path");
    require(weights_path, "weights_path");
    require(penalty_path, "penalty_path");
    const auto& names = c->value.classes().names();
    serkit::CoCountMatrix counts = serkit::co_counts(c->value);
    serkit::Matrix weights = serkit::co_weights(counts, names);
    serkit::Matrix penalty = serkit::penalty_from_weights(weights);
    serkit::write_file_atomic(counts_path,
                              serkit::matrix_to_csv(counts, names));
    serkit::write_file_atomic(weights_path,
                              serkit::matrix_to_csv(weights, names));
    serkit::write_file_atomic(penalty_path,
                              serkit::matrix_to_csv(penalty, names));
  });
}

serkit_status serkit_penalty_json(const serkit_corpus* c, char** out_json) {
  return guard([&] {
    require(c, "corpus");
    require(out_json, "out");
    const auto& names = c->value.classes().names();
    serkit::CoCountMatrix counts = serkit::co_counts(c->value);
    serkit::Matrix weights = serkit::co_weights(counts, names);
    serkit::Matrix penalty = serkit::penalty_from_weights(weights);
    json j{{"classes", names},
           {"counts", counts.data()},
           {"weights", weights.data()},
           {"penalty", penalty.data()},
           {"row_sum_weights", serkit::row_sum_weights(penalty)}};
    *out_json = dup_string(j.dump(2) + "\n");
  });
}

serkit_status serkit_train(const serkit_corpus* c, const char* features_path,
                           const char* targets_path, const char* config_json,
                           const char* model_out_path,
                           char** out_summary_json) {
  return guard([&] {
    require(c, "corpus");
    require(features_path, "features_path");
    require(targets_path, "targets_path");
    require(model_out_path, "model_out_path");
    require(out_summary_json, "out");
    serkit::TrainConfig cfg = parse_train_config(config_json);

    serkit::FeatureSet features = serkit::load_features(features_path);
    serkit::ValueTable targets = serkit::read_value_table(targets_path);
    if (targets.columns != c->value.classes().names())
      throw serkit::InputError(
          "target columns do not match the corpus class set");

    std::map<std::string, std::size_t> feat_row;
    for (std::size_t i = 0; i < features.ids.size(); ++i)
      if (!feat_row.emplace(features.ids[i], i).second)
        throw serkit::InputError("duplicate feature row for '" +
                                 features.ids[i] + "'");
    std::size_t d = features.values.cols();
    serkit::Matrix x(targets.ids.size(), d);
    for (std::size_t i = 0; i < targets.ids.size(); ++i) {
      auto it = feat_row.find(targets.ids[i]);
      if (it == feat_row.end())
        throw serkit::InputError("no feature row for labeled utterance '" +
                                 targets.ids[i] + "'");
      for (std::size_t jx = 0; jx < d; ++jx)
        x.at(i, jx) = features.values.at(it->second, jx);
    }

    serkit::TrainResult result =
        serkit::train(x, targets.values, cfg);
    serkit::save_model(model_out_path, result.params, cfg, result);
    json j{{"best_epoch", result.best_epoch},
           {"epochs_run", result.trace.size()},
           {"n_train", targets.ids.size() - result.dev_indices.size()},
           {"n_dev", result.dev_indices.size()},
           {"final_train_loss", result.trace.back().train_loss},
           {"final_dev_loss", result.trace.back().dev_loss},
           {"best_dev_loss",
            result.trace[result.best_epoch - 1].dev_loss},
           {"model", model_out_path}};
    *out_summary_json = dup_string(j.dump(2) + "\n");
  });
}

serkit_status serkit_evaluate(const serkit_corpus* c, const char* model_path,
                              const char* features_path, const char* rule,
                              const char* threshold,
                              char** out_report_json) {
  return guard([&] {
    require(c, "corpus");
    require(model_path, "model_path");
    require(features_path, "features_path");
    require(rule, "rule");
    require(out_report_json, "out");
    serkit::EvalConfig cfg;
    cfg.rule = serkit::test_rule_from_string(rule);
    if (threshold && std::string(threshold) != "auto")
      cfg.threshold = serkit::parse_double(threshold, "threshold");
    serkit::ModelParams params = serkit::load_model(model_path);
    serkit::FeatureSet features = serkit::load_features(features_path);
    serkit::EvalReport rep =
        serkit::evaluate_model(params, c->value, features, cfg);
    *out_report_json = dup_string(rep.to_json());
  });
}

serkit_status serkit_eval_table(const char* reports_json_array,
                                char** out_table) {
  return guard([&] {
    require(reports_json_array, "reports");
    require(out_table, "out");
    json arr;
    try {
      arr = json::parse(reports_json_array);
    } catch (const json::exception& e) {
      throw serkit::InputError(std::string("reports are not valid JSON: ") +
                               e.what());
    }
    if (!arr.is_array())
      throw serkit::InputError("expected a JSON array of evaluation reports");
    std::vector<serkit::EvalReport> reports;
    for (const json& item : arr)
      reports.push_back(serkit::EvalReport::from_json(item.dump()));
    *out_table = dup_string(serkit::render_eval_table(reports));
  });
}

serkit_status serkit_synth(const char* config_json, const char* corpus_out,
                           const char* features_out, const char* truth_out,
                           char** out_summary_json) {
  return guard([&] {
    require(config_json, "config");
    require(corpus_out, "corpus_out");
    require(features_out, "features_out");
    require(truth_out, "truth_out");
    require(out_summary_json, "out");
    serkit::SynthConfig cfg = serkit::synth_config_from_json(config_json);
    serkit::SynthResult res = serkit::generate(cfg);
    serkit::save_corpus(res.corpus, corpus_out);
    serkit::save_features(features_out, res.features);
    serkit::write_file_atomic(truth_out, serkit::truth_to_json(res.truth));
    serkit::SynthCheckReport check = serkit::empirical_check(res, cfg);
    json j{{"n_utterances", cfg.n_utterances},
           {"n_rated", res.corpus.size()},
           {"n_unrated", res.n_unrated},
           {"corpus", corpus_out},
           {"features", features_out},
           {"truth", truth_out},
           {"check", json::parse(serkit::check_report_to_json(check))}};
    *out_summary_json = dup_string(j.dump(2) + "\n");
  });
}

serkit_status serkit_fold_ttest_json(const double* a, size_t n_a,
                                     const double* b, size_t n_b,
                                     size_t n_folds, uint64_t seed,
                                     char** out_json) {
  return guard([&] {
    require(a, "a");
    require(b, "b");
    require(out_json, "out");
    serkit::TTestResult r = serkit::fold_split_ttest(
        std::vector<double>(a, a + n_a), std::vector<double>(b, b + n_b),
        n_folds, seed);
    json j{{"mean_a", r.mean_a},   {"mean_b", r.mean_b},
           {"t", r.t},             {"df", r.df},
           {"p", r.p},             {"fold_means_a", r.fold_means_a},
           {"fold_means_b", r.fold_means_b}};
    *out_json = dup_string(j.dump(2) + "\n");
  });
}

}  // extern "C"
