// serkit: annotation aggregation, label encoding, penalized training and
// evaluation from the command line. Thin shell over the C API: all domain
// work happens behind serkit.h, this file only moves flags and files.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "serkit.h"

using nlohmann::json;

namespace {

[[noreturn]] void die(int code, const std::string& msg) {
  std::cerr << "serkit: " << msg << "\n";
  std::exit(code);
}

// C API failures carry their own message; input problems exit 2, the rest 1.
void check(serkit_status st) {
  if (st == SERKIT_OK) return;
  die(st == SERKIT_ERR_INPUT ? 2 : 1, serkit_last_error());
}

std::string own(char* s) {
  std::string out = s ? s : "";
  serkit_string_free(s);
  return out;
}

struct Corpus {
  serkit_corpus* h = nullptr;
  ~Corpus() { serkit_corpus_free(h); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(2, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Temp-then-rename, so a crashed run never leaves a half-written file.
void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) die(2, "cannot write '" + tmp + "'");
    out << content;
    if (!out) die(1, "write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    die(1, "cannot rename '" + tmp + "' to '" + path + "'");
}

std::string dirname_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  if (slash == 0) return "/";
  return path.substr(0, slash);
}

std::string basename_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string stem_of(const std::string& path) {
  std::string base = basename_of(path);
  std::size_t dot = base.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

// Reruns must reproduce outputs byte for byte, so the manifest records the
// resolved config and never a timestamp.
void write_run_manifest(const std::string& subcommand, const json& config,
                        const std::vector<std::string>& inputs,
                        const std::vector<std::string>& outputs) {
  if (outputs.empty()) return;
  json m{{"tool", "serkit"},
         {"version", serkit_version()},
         {"subcommand", subcommand},
         {"seed", config.value("seed", std::uint64_t{0})},
         {"config", config},
         {"inputs", inputs},
         {"outputs", outputs}};
  std::string path =
      dirname_of(outputs.front()) + "/" + subcommand + "_run_manifest.json";
  write_atomic(path, m.dump(2) + "\n");
}

Corpus load_corpus(const json& cfg) {
  std::string path = cfg.at("corpus").get<std::string>();
  std::string classes = cfg.at("classes").get<std::string>();
  std::string name = cfg.value("name", "");
  if (name.empty()) name = stem_of(path);
  std::string schema;
  if (cfg.contains("schema")) schema = read_file(cfg["schema"]);
  Corpus c;
  check(serkit_corpus_load(path.c_str(), classes.c_str(), name.c_str(),
                           schema.empty() ? nullptr : schema.c_str(), &c.h));
  return c;
}

std::vector<std::string> corpus_inputs(const json& cfg) {
  std::vector<std::string> in{cfg.at("corpus").get<std::string>()};
  if (cfg.contains("schema")) in.push_back(cfg["schema"]);
  return in;
}

// ---- subcommand bodies; replay re-enters through these with a stored
// config, so everything they need must come from `cfg` ----

void run_ingest(const json& cfg) {
  Corpus c = load_corpus(cfg);
  std::string out = cfg.at("out").get<std::string>();
  check(serkit_corpus_save(c.h, out.c_str()));
  char* info = nullptr;
  check(serkit_corpus_info_json(c.h, &info));
  std::cout << own(info);
  write_run_manifest("ingest", cfg, corpus_inputs(cfg), {out});
}

void run_partition(const json& cfg) {
  char* m = nullptr;
  check(serkit_partition_json(cfg.at("dataset").get<std::string>().c_str(),
                              cfg.value("seed", std::uint64_t{0}), &m));
  std::string out = cfg.at("out").get<std::string>();
  write_atomic(out, own(m));
  write_run_manifest("partition", cfg, {}, {out});
}

void run_aggregate(const json& cfg) {
  Corpus c = load_corpus(cfg);
  std::string rule = cfg.at("rule").get<std::string>();
  std::string dir = cfg.at("out_dir").get<std::string>();

  char* outcomes = nullptr;
  check(serkit_aggregate_outcomes_csv(c.h, rule.c_str(),
                                      cfg.value("seed", std::uint64_t{0}),
                                      &outcomes));
  write_atomic(dir + "/outcomes.csv", own(outcomes));

  char* report = nullptr;
  check(serkit_loss_report_json(c.h, rule.c_str(), &report));
  write_atomic(dir + "/loss_report.json", own(report));

  char* table = nullptr;
  check(serkit_loss_table(c.h, rule.c_str(), &table));
  std::string rendered = own(table);
  write_atomic(dir + "/loss_report.txt", rendered);
  std::cout << rendered;

  write_run_manifest("aggregate", cfg, corpus_inputs(cfg),
                     {dir + "/outcomes.csv", dir + "/loss_report.json",
                      dir + "/loss_report.txt"});
}

void run_encode(const json& cfg) {
  Corpus c = load_corpus(cfg);
  json spec{{"kind", cfg.at("kind")},
            {"alpha", cfg.value("alpha", 0.75)},
            {"smooth", cfg.value("smooth", 0.0)},
            {"seed", cfg.value("seed", std::uint64_t{0})}};
  if (cfg.contains("rule")) spec["rule"] = cfg["rule"];
  std::string out = cfg.at("out").get<std::string>();
  char* summary = nullptr;
  check(serkit_encode_to_file(c.h, spec.dump().c_str(), out.c_str(),
                              &summary));
  std::cout << own(summary);
  write_run_manifest("encode", cfg, corpus_inputs(cfg), {out});
}

void run_penalty(const json& cfg) {
  Corpus c = load_corpus(cfg);
  std::string dir = cfg.at("out_dir").get<std::string>();
  std::string counts = dir + "/cooccurrence_counts.csv";
  std::string weights = dir + "/cooccurrence_weights.csv";
  std::string penalty = dir + "/penalty.csv";
  check(serkit_penalty_write(c.h, counts.c_str(), weights.c_str(),
                             penalty.c_str()));
  char* j = nullptr;
  check(serkit_penalty_json(c.h, &j));
  std::cout << own(j);
  write_run_manifest("penalty", cfg, corpus_inputs(cfg),
                     {counts, weights, penalty});
}

void run_train(const json& cfg) {
  Corpus c = load_corpus(cfg);
  json train_cfg{{"loss", cfg.at("loss")},
                 {"alpha", cfg.value("alpha", 0.0)},
                 {"beta", cfg.value("beta", 1.0)},
                 {"hidden", cfg.value("hidden", 16)},
                 {"learning_rate", cfg.value("learning_rate", 0.05)},
                 {"batch_size", cfg.value("batch_size", 32)},
                 {"epochs", cfg.value("epochs", 100)},
                 {"patience", cfg.value("patience", 15)},
                 {"momentum", cfg.value("momentum", 0.0)},
                 {"dev_fraction", cfg.value("dev_fraction", 0.1)},
                 {"seed", cfg.value("seed", std::uint64_t{0})}};
  if (cfg.contains("penalty")) train_cfg["penalty_path"] = cfg["penalty"];
  std::string features = cfg.at("features").get<std::string>();
  std::string targets = cfg.at("targets").get<std::string>();
  std::string out = cfg.at("out").get<std::string>();
  char* summary = nullptr;
  check(serkit_train(c.h, features.c_str(), targets.c_str(),
                     train_cfg.dump().c_str(), out.c_str(), &summary));
  std::string summary_str = own(summary);
  std::string summary_path = dirname_of(out) + "/train_summary.json";
  write_atomic(summary_path, summary_str);
  std::cout << summary_str;

  std::vector<std::string> inputs = corpus_inputs(cfg);
  inputs.push_back(features);
  inputs.push_back(targets);
  if (cfg.contains("penalty")) inputs.push_back(cfg["penalty"]);
  write_run_manifest("train", cfg, inputs, {out, summary_path});
}

void run_evaluate(const json& cfg) {
  Corpus c = load_corpus(cfg);
  std::string model = cfg.at("model").get<std::string>();
  std::string features = cfg.at("features").get<std::string>();
  std::string rule = cfg.at("test_rule").get<std::string>();
  std::string threshold = cfg.value("threshold", "auto");
  std::string out = cfg.at("out").get<std::string>();
  char* report = nullptr;
  check(serkit_evaluate(c.h, model.c_str(), features.c_str(), rule.c_str(),
                        threshold.c_str(), &report));
  std::string report_str = own(report);
  write_atomic(out, report_str);

  char* table = nullptr;
  check(serkit_eval_table(("[" + report_str + "]").c_str(), &table));
  std::cout << own(table);
  write_run_manifest("evaluate", cfg,
                     {cfg.at("corpus").get<std::string>(), model, features},
                     {out});
}

void run_synth(const json& cfg) {
  std::string config_path = cfg.at("config").get<std::string>();
  std::string dir = cfg.at("out_dir").get<std::string>();
  std::string corpus = dir + "/corpus.csv";
  std::string features = dir + "/features.csv";
  std::string truth = dir + "/truth.json";
  char* summary = nullptr;
  check(serkit_synth(read_file(config_path).c_str(), corpus.c_str(),
                     features.c_str(), truth.c_str(), &summary));
  std::string summary_str = own(summary);
  std::string summary_path = dir + "/synth_summary.json";
  write_atomic(summary_path, summary_str);
  std::cout << summary_str;
  write_run_manifest("synth", cfg, {config_path},
                     {corpus, features, truth, summary_path});
}

void run_report(const json& cfg) {
  std::string rendered;

  if (cfg.contains("rules")) {
    Corpus c = load_corpus(cfg);
    char* table = nullptr;
    check(serkit_loss_table(
        c.h, cfg.at("rules").get<std::string>().c_str(), &table));
    rendered += own(table);
  }

  if (cfg.contains("eval")) {
    json arr = json::array();
    for (const auto& path : cfg.at("eval")) {
      json r;
      try {
        r = json::parse(read_file(path));
      } catch (const json::exception& e) {
        die(2, path.get<std::string>() + ": " + e.what());
      }
      arr.push_back(r);
    }
    char* table = nullptr;
    check(serkit_eval_table(arr.dump().c_str(), &table));
    rendered += own(table);
  }

  if (cfg.contains("compare")) {
    auto paths = cfg.at("compare").get<std::vector<std::string>>();
    std::string metric = cfg.value("metric", "score");
    json a, b;
    try {
      a = json::parse(read_file(paths.at(0)));
      b = json::parse(read_file(paths.at(1)));
    } catch (const json::exception& e) {
      die(2, std::string("comparison reports: ") + e.what());
    }
    if (a.value("ids", json::array()) != b.value("ids", json::array()))
      die(2, "comparison reports cover different utterances");
    auto items = [&](const json& r) {
      if (metric == "kld") {
        if (!r.contains("item_kld"))
          die(2, "report has no divergence items (sigmoid head?)");
        return r.at("item_kld").get<std::vector<double>>();
      }
      const char* key = r.value("multilabel", false) ? "item_hamming"
                                                     : "item_correct";
      if (!r.contains(key)) die(2, std::string("report has no ") + key);
      return r.at(key).get<std::vector<double>>();
    };
    std::vector<double> va = items(a), vb = items(b);
    char* tt = nullptr;
    check(serkit_fold_ttest_json(va.data(), va.size(), vb.data(), vb.size(),
                                 cfg.value("folds", std::size_t{5}),
                                 cfg.value("seed", std::uint64_t{0}), &tt));
    rendered += own(tt);
  }

  if (rendered.empty())
    die(2, "report: pass --rules, --eval or --compare");
  std::cout << rendered;
  if (cfg.contains("out")) {
    std::string out = cfg.at("out").get<std::string>();
    write_atomic(out, rendered);
    std::vector<std::string> inputs;
    if (cfg.contains("corpus")) inputs.push_back(cfg["corpus"]);
    if (cfg.contains("eval"))
      for (const auto& p : cfg["eval"]) inputs.push_back(p);
    if (cfg.contains("compare"))
      for (const auto& p : cfg["compare"]) inputs.push_back(p);
    write_run_manifest("report", cfg, inputs, {out});
  }
}

void dispatch(const std::string& subcommand, const json& cfg);

void run_replay(const json& cfg) {
  std::string path = cfg.at("manifest").get<std::string>();
  json m;
  try {
    m = json::parse(read_file(path));
  } catch (const json::exception& e) {
    die(2, path + ": " + e.what());
  }
  if (m.value("tool", "") != "serkit")
    die(2, path + ": not a serkit run manifest");
  std::string sub = m.value("subcommand", "");
  json stored = m.value("config", json::object());
  if (cfg.contains("out_dir")) {
    // Same basenames, new directory; inputs stay where they were.
    std::string dir = cfg.at("out_dir").get<std::string>();
    if (stored.contains("out"))
      stored["out"] = dir + "/" + basename_of(stored["out"]);
    if (stored.contains("out_dir")) stored["out_dir"] = dir;
  }
  dispatch(sub, stored);
}

void ensure_output_dirs(const json& cfg) {
  std::error_code ec;
  if (cfg.contains("out_dir"))
    std::filesystem::create_directories(
        cfg.at("out_dir").get<std::string>(), ec);
  if (cfg.contains("out")) {
    std::string parent = dirname_of(cfg.at("out").get<std::string>());
    if (parent != ".") std::filesystem::create_directories(parent, ec);
  }
  // A failure here surfaces as the write error it causes.
}

void dispatch(const std::string& subcommand, const json& cfg) {
  ensure_output_dirs(cfg);
  if (subcommand == "ingest") return run_ingest(cfg);
  if (subcommand == "partition") return run_partition(cfg);
  if (subcommand == "aggregate") return run_aggregate(cfg);
  if (subcommand == "encode") return run_encode(cfg);
  if (subcommand == "penalty") return run_penalty(cfg);
  if (subcommand == "train") return run_train(cfg);
  if (subcommand == "evaluate") return run_evaluate(cfg);
  if (subcommand == "synth") return run_synth(cfg);
  if (subcommand == "report") return run_report(cfg);
  if (subcommand == "replay") return run_replay(cfg);
  die(2, "unknown subcommand '" + subcommand + "' in manifest");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annotation aggregation and penalized-loss toolkit"};
  app.set_version_flag("--version", serkit_version());
  app.require_subcommand(1);

  // Shared corpus flags.
  std::string corpus_path, classes, name, schema;
  auto add_corpus_flags = [&](CLI::App* sub, bool positional = true) {
    if (positional)
      sub->add_option("corpus", corpus_path, "annotation CSV")->required();
    sub->add_option("--classes", classes,
                    "comma-separated class names, in encoding order")
        ->required();
    sub->add_option("--name", name, "corpus label for reports");
    sub->add_option("--schema", schema, "JSON column-name remapping file");
  };
  auto corpus_cfg = [&]() {
    json cfg{{"corpus", corpus_path}, {"classes", classes}};
    if (!name.empty()) cfg["name"] = name;
    if (!schema.empty()) cfg["schema"] = schema;
    return cfg;
  };

  std::string out, out_dir, rule = "mr", kind, dataset;
  std::uint64_t seed = 0;
  double alpha = 0.75, smooth = 0.0;

  CLI::App* ingest = app.add_subcommand(
      "ingest", "canonicalize an annotation CSV and summarize it");
  add_corpus_flags(ingest);
  ingest->add_option("--out", out, "canonical corpus CSV")->required();

  CLI::App* partition = app.add_subcommand(
      "partition", "emit a built-in cross-validation fold manifest");
  partition->add_option("--dataset", dataset, "layout id, e.g. IEMOCAP")
      ->required();
  partition->add_option("--seed", seed, "dev-split seed");
  partition->add_option("--out", out, "fold manifest JSON")->required();

  CLI::App* aggregate = app.add_subcommand(
      "aggregate", "apply a consensus rule and report data/rating loss");
  add_corpus_flags(aggregate);
  aggregate->add_option("--rule", rule, "mr, pr or ar")->required();
  aggregate->add_option("--seed", seed, "tie-break seed (ar only)");
  aggregate->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* encode = app.add_subcommand(
      "encode", "write training targets for a label encoding");
  add_corpus_flags(encode);
  encode
      ->add_option("--kind", kind, "hard, fraction, alpha-soft or multi-hot")
      ->required();
  CLI::Option* encode_rule =
      encode->add_option("--rule", rule, "consensus rule (hard only)");
  CLI::Option* encode_alpha =
      encode->add_option("--alpha", alpha, "alpha-soft prior mass");
  encode->add_option("--smooth", smooth, "label smoothing epsilon");
  encode->add_option("--seed", seed, "tie-break seed for hard ar labels");
  encode->add_option("--out", out, "label table CSV")->required();

  CLI::App* penalty = app.add_subcommand(
      "penalty", "derive co-occurrence count, weight and penalty matrices");
  add_corpus_flags(penalty);
  penalty->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* train = app.add_subcommand(
      "train", "fit the reference classifier on encoded targets");
  add_corpus_flags(train);
  std::string features_path, targets_path, loss, penalty_path, model_path;
  double beta = 1.0, learning_rate = 0.05, momentum = 0.0, dev_fraction = 0.1;
  std::size_t hidden = 16, batch_size = 32, epochs = 100, patience = 15;
  train->add_option("--features", features_path, "feature table CSV")
      ->required();
  train->add_option("--targets", targets_path, "label table CSV")->required();
  train->add_option("--loss", loss, "ce, bce or kld")->required();
  CLI::Option* train_alpha =
      train->add_option("--alpha", alpha, "penalty weight");
  train->add_option("--beta", beta, "base loss weight");
  train->add_option("--penalty", penalty_path, "penalty matrix CSV");
  train->add_option("--hidden", hidden, "hidden units");
  train->add_option("--learning-rate", learning_rate, "step size");
  train->add_option("--batch-size", batch_size, "minibatch size");
  train->add_option("--epochs", epochs, "maximum epochs");
  train->add_option("--patience", patience, "early-stopping patience");
  train->add_option("--momentum", momentum, "momentum coefficient");
  train->add_option("--dev-fraction", dev_fraction, "held-out dev share");
  train->add_option("--seed", seed, "training seed");
  train->add_option("--out", model_path, "model checkpoint JSON")->required();

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score a checkpoint on a rule-selected test set");
  add_corpus_flags(evaluate);
  std::string test_rule, threshold = "auto";
  evaluate->add_option("--model", model_path, "model checkpoint")->required();
  evaluate->add_option("--features", features_path, "feature table CSV")
      ->required();
  evaluate
      ->add_option("--test-rule", test_rule, "mr, pr, ar, pr-mr or ar-pr")
      ->required();
  evaluate->add_option("--threshold", threshold,
                       "auto (one over the class count) or a number in (0,1)");
  evaluate->add_option("--out", out, "evaluation report JSON")->required();

  CLI::App* synth = app.add_subcommand(
      "synth", "generate a synthetic annotation corpus from rater profiles");
  std::string synth_config;
  synth->add_option("--config", synth_config, "generator config JSON")
      ->required();
  synth->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* report = app.add_subcommand(
      "report", "render tables and significance tests from saved outputs");
  std::vector<std::string> eval_paths, compare_paths;
  std::string rules_csv, metric = "score";
  std::size_t folds = 5;
  report->add_option("--corpus", corpus_path, "annotation CSV");
  report->add_option("--classes", classes, "comma-separated class names");
  report->add_option("--name", name, "corpus label for reports");
  report->add_option("--schema", schema, "JSON column-name remapping file");
  report->add_option("--rules", rules_csv,
                     "loss table over comma-separated rules");
  report->add_option("--eval", eval_paths, "evaluation reports to tabulate");
  report->add_option("--compare", compare_paths,
                     "two evaluation reports for a fold-split t-test")
      ->expected(2);
  report->add_option("--metric", metric, "score or kld (t-test input)");
  report->add_option("--folds", folds, "fold count for the t-test");
  report->add_option("--seed", seed, "fold assignment seed");
  report->add_option("--out", out, "also save the rendered output here");

  CLI::App* replay = app.add_subcommand(
      "replay", "re-run a subcommand from its run manifest");
  std::string manifest_path;
  replay->add_option("--manifest", manifest_path, "run manifest JSON")
      ->required();
  replay->add_option("--out-dir", out_dir,
                     "redirect outputs into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "serkit: " << e.what() << "\n";
    return 2;
  }

  try {
  if (*ingest) {
    json cfg = corpus_cfg();
    cfg["out"] = out;
    dispatch("ingest", cfg);
  } else if (*partition) {
    dispatch("partition",
             json{{"dataset", dataset}, {"seed", seed}, {"out", out}});
  } else if (*aggregate) {
    json cfg = corpus_cfg();
    cfg["rule"] = rule;
    cfg["seed"] = seed;
    cfg["out_dir"] = out_dir;
    dispatch("aggregate", cfg);
  } else if (*encode) {
    if (*encode_rule && kind != "hard")
      die(2, "--rule only applies to --kind hard");
    if (*encode_alpha && kind != "alpha-soft")
      die(2, "--alpha only applies to --kind alpha-soft");
    json cfg = corpus_cfg();
    cfg["kind"] = kind;
    if (*encode_rule) cfg["rule"] = rule;
    cfg["alpha"] = alpha;
    cfg["smooth"] = smooth;
    cfg["seed"] = seed;
    cfg["out"] = out;
    dispatch("encode", cfg);
  } else if (*penalty) {
    json cfg = corpus_cfg();
    cfg["out_dir"] = out_dir;
    dispatch("penalty", cfg);
  } else if (*train) {
    json cfg = corpus_cfg();
    cfg["features"] = features_path;
    cfg["targets"] = targets_path;
    cfg["loss"] = loss;
    cfg["alpha"] = *train_alpha ? alpha : 0.0;
    cfg["beta"] = beta;
    if (!penalty_path.empty()) cfg["penalty"] = penalty_path;
    cfg["hidden"] = hidden;
    cfg["learning_rate"] = learning_rate;
    cfg["batch_size"] = batch_size;
    cfg["epochs"] = epochs;
    cfg["patience"] = patience;
    cfg["momentum"] = momentum;
    cfg["dev_fraction"] = dev_fraction;
    cfg["seed"] = seed;
    cfg["out"] = model_path;
    dispatch("train", cfg);
  } else if (*evaluate) {
    json cfg = corpus_cfg();
    cfg["model"] = model_path;
    cfg["features"] = features_path;
    cfg["test_rule"] = test_rule;
    cfg["threshold"] = threshold;
    cfg["out"] = out;
    dispatch("evaluate", cfg);
  } else if (*synth) {
    dispatch("synth", json{{"config", synth_config}, {"out_dir", out_dir}});
  } else if (*report) {
    json cfg;
    if (!corpus_path.empty()) {
      cfg["corpus"] = corpus_path;
      cfg["classes"] = classes;
      if (!name.empty()) cfg["name"] = name;
      if (!schema.empty()) cfg["schema"] = schema;
    }
    if (!rules_csv.empty()) cfg["rules"] = rules_csv;
    if (!eval_paths.empty()) cfg["eval"] = eval_paths;
    if (!compare_paths.empty()) {
      cfg["compare"] = compare_paths;
      cfg["metric"] = metric;
      cfg["folds"] = folds;
      cfg["seed"] = seed;
    }
    if (!out.empty()) cfg["out"] = out;
    dispatch("report", cfg);
  } else if (*replay) {
    json cfg{{"manifest", manifest_path}};
    if (!out_dir.empty()) cfg["out_dir"] = out_dir;
    dispatch("replay", cfg);
  }
  } catch (const json::exception& e) {
    // Replayed manifests can be hand-edited; missing keys land here.
    die(2, e.what());
  }
  return 0;
}
