/* C interface to the serkit core: annotation corpora, consensus rules,
 * label encodings, co-occurrence penalties, the reference classifier and the
 * evaluation suite, behind opaque handles and status codes.
 *
 * Every function that can fail returns a serkit_status; on failure
 * serkit_last_error() describes the problem (per thread). Strings the
 * library hands out via char** are owned by the caller and must be released
 * with serkit_string_free(). Models travel as checkpoint files, not handles:
 * serkit_train writes one, serkit_evaluate reads one.
 */
#ifndef SERKIT_H
#define SERKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SERKIT_OK = 0,
  SERKIT_ERR_INPUT = 1,   /* malformed input, bad flags, schema violations */
  SERKIT_ERR_INTERNAL = 2 /* anything else; a bug or an environment failure */
} serkit_status;

typedef struct serkit_corpus serkit_corpus;

const char* serkit_version(void);

/* Message from the last failing call on this thread; "" if none. The
 * returned pointer stays valid until the next failing call. */
const char* serkit_last_error(void);

void serkit_string_free(char* s);

/* ---- corpus ---- */

/* Loads an annotation CSV. classes_csv is comma-separated, in encoding
 * order. schema_json remaps column names, e.g. {"utterance_id": "uid"};
 * NULL keeps the defaults. name labels reports; NULL means unnamed. */
serkit_status serkit_corpus_load(const char* path, const char* classes_csv,
                                 const char* name, const char* schema_json,
                                 serkit_corpus** out);
void serkit_corpus_free(serkit_corpus* c);
serkit_status serkit_corpus_save(const serkit_corpus* c, const char* path);

/* Counts and rosters: classes, raters, per-class vote totals. */
serkit_status serkit_corpus_info_json(const serkit_corpus* c, char** out_json);

serkit_status serkit_corpus_subsample(const serkit_corpus* c, size_t n,
                                      uint64_t seed, serkit_corpus** out);
serkit_status serkit_corpus_rater_view(const serkit_corpus* c,
                                       const char* rater_id,
                                       serkit_corpus** out);

/* ---- cross-validation layouts ---- */

/* Validated fold manifest for a built-in dataset layout. */
serkit_status serkit_partition_json(const char* dataset_id, uint64_t seed,
                                    char** out_json);

/* ---- consensus rules ---- */

/* Per-utterance outcomes under rule "mr", "pr" or "ar":
 * utterance_id,kept,class,tie_set. The seed only feeds ar's tie draws. */
serkit_status serkit_aggregate_outcomes_csv(const serkit_corpus* c,
                                            const char* rule, uint64_t seed,
                                            char** out_csv);
serkit_status serkit_loss_report_json(const serkit_corpus* c, const char* rule,
                                      char** out_json);
/* Data/rating loss table over comma-separated rules, e.g. "mr,pr,ar". */
serkit_status serkit_loss_table(const serkit_corpus* c, const char* rules_csv,
                                char** out_table);

/* ---- label encodings ---- */

/* spec_json: {"kind": "hard"|"fraction"|"alpha-soft"|"multi-hot",
 *  "rule": "mr"|"pr"|"ar" (hard only), "alpha": 0.75, "smooth": 0.0,
 *  "seed": 0}. Writes the label table to out_path; the summary lists
 * encoded/dropped/skipped utterances. */
serkit_status serkit_encode_to_file(const serkit_corpus* c,
                                    const char* spec_json,
                                    const char* out_path,
                                    char** out_summary_json);

/* ---- co-occurrence penalties ---- */

/* Writes the count, weight and penalty matrices as labeled CSVs. */
serkit_status serkit_penalty_write(const serkit_corpus* c,
                                   const char* counts_path,
                                   const char* weights_path,
                                   const char* penalty_path);
/* The same three matrices in one JSON object. */
serkit_status serkit_penalty_json(const serkit_corpus* c, char** out_json);

/* ---- training ---- */

/* Trains the reference classifier on feature and label tables (aligned by
 * utterance id; every labeled utterance needs a feature row).
 * config_json: {"loss": "ce"|"bce"|"kld", "alpha": 0, "beta": 1,
 *  "penalty_path": "...", "hidden": 16, "learning_rate": 0.05,
 *  "batch_size": 32, "epochs": 100, "patience": 15, "momentum": 0,
 *  "dev_fraction": 0.1, "seed": 0} — all optional except loss.
 * Writes the checkpoint to model_out_path; the summary carries the best
 * epoch and the loss trace endpoints. */
serkit_status serkit_train(const serkit_corpus* c, const char* features_path,
                           const char* targets_path, const char* config_json,
                           const char* model_out_path,
                           char** out_summary_json);

/* ---- evaluation ---- */

/* Scores a checkpoint on the test set the rule selects: "mr", "pr", "ar",
 * "pr-mr" or "ar-pr". threshold is "auto" (one over the class count) or a
 * number in (0,1); it only affects the multi-label rules. */
serkit_status serkit_evaluate(const serkit_corpus* c, const char* model_path,
                              const char* features_path, const char* rule,
                              const char* threshold, char** out_report_json);

/* Renders a JSON array of evaluation reports as an aligned table. */
serkit_status serkit_eval_table(const char* reports_json_array,
                                char** out_table);

/* ---- synthetic corpora ---- */

/* Generates an annotation corpus from a rater-profile config and writes the
 * corpus CSV, the feature table and the truth table. The summary carries
 * counts and the empirical convergence checks. */
serkit_status serkit_synth(const char* config_json, const char* corpus_out,
                           const char* features_out, const char* truth_out,
                           char** out_summary_json);

/* ---- significance ---- */

/* Welch t-test over paired fold means of two per-item score vectors. */
serkit_status serkit_fold_ttest_json(const double* a, size_t n_a,
                                     const double* b, size_t n_b,
                                     size_t n_folds, uint64_t seed,
                                     char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* SERKIT_H */
