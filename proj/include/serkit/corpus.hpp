#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "serkit/errors.hpp"

namespace serkit {

// Ordered label space. Class order is fixed at construction and every vector
// or matrix in the library indexes classes in this order.
class ClassSet {
 public:
  explicit ClassSet(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }

  // -1 when the name is not in the set.
  int index_of(std::string_view name) const;

  bool operator==(const ClassSet& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

// One rater's vote on one utterance. Votes naming classes outside the class
// set are retained (class_index == -1) and show up as "other" in loss
// accounting; they never contribute to label vectors.
struct Rating {
  std::string rater_id;
  std::string class_name;
  int class_index = -1;

  bool operator==(const Rating& o) const = default;
};

struct Utterance {
  std::string id;
  std::string session;  // may be empty
  std::string speaker;  // may be empty
  std::vector<Rating> ratings;

  bool operator==(const Utterance& o) const = default;
};

struct VoteCount {
  std::vector<std::int64_t> counts;  // class-set order
  std::int64_t total_in_set = 0;
  std::int64_t total_all = 0;  // includes out-of-set votes
};

// Canonical annotated corpus: utterances sorted by id, ratings sorted by
// rater id. Canonical order makes ingestion insensitive to input row order
// and downstream outputs byte-reproducible.
class Corpus {
 public:
  Corpus(ClassSet classes, std::vector<Utterance> utterances,
         std::string name = "");

  const ClassSet& classes() const { return classes_; }
  const std::vector<Utterance>& utterances() const { return utterances_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return utterances_.size(); }

  const Utterance* find(std::string_view id) const;

  bool operator==(const Corpus& o) const {
    return classes_ == o.classes_ && utterances_ == o.utterances_;
  }

 private:
  ClassSet classes_;
  std::vector<Utterance> utterances_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string name_;
};

// Column-name mapping for annotation CSVs. Fields left at their defaults
// match the standard header; session/speaker columns are optional.
struct CsvSchema {
  std::string utterance_id = "utterance_id";
  std::string rater_id = "rater_id";
  std::string class_name = "class";
  std::string session = "session";
  std::string speaker = "speaker";
};

// Reads an annotation CSV (one rating per row). Malformed rows and duplicate
// (utterance, rater) pairs raise InputError naming the line.
Corpus load_annotations(const std::string& path, const ClassSet& classes,
                        const CsvSchema& schema = {}, std::string name = "");

std::string corpus_to_csv(const Corpus& c);
void save_corpus(const Corpus& c, const std::string& path);

VoteCount vote_counts(const Utterance& u, const ClassSet& classes);

// Uniform n-utterance subsample, deterministic per seed. n equal to the
// corpus size returns the identical corpus.
Corpus subsample(const Corpus& c, std::size_t n, std::uint64_t seed);

// Corpus restricted to one rater's ratings. Unknown rater raises InputError.
Corpus rater_view(const Corpus& c, const std::string& rater_id);

std::vector<std::string> rater_ids(const Corpus& c);

}  // namespace serkit
