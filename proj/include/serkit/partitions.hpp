#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace serkit {

struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
};

// Dev set defined as a seeded random fraction of the training utterances,
// carved at application time rather than listed in the manifest.
struct DevRule {
  double fraction = 0.1;
  std::uint64_t seed = 0;
};

// Speaker-group metadata for datasets whose sessions are defined by speaker
// id ranges.
struct SessionInfo {
  std::vector<std::string> speakers;
  int males = 0;
  int females = 0;
};

struct PartitionManifest {
  std::string dataset_id;
  std::string selector;  // "session" or "speaker": what fold entries match on
  std::vector<Fold> folds;
  std::optional<DevRule> dev_rule;  // replaces per-fold dev lists when set
  std::map<std::string, SessionInfo> sessions;  // speaker-group definitions

  // Checks, from the manifest alone: within each fold the train/dev/test
  // selector sets are pairwise disjoint, and across folds the test selectors
  // cover every selector mentioned anywhere exactly once.
  void validate() const;

  std::string to_json() const;
  static PartitionManifest from_json(const std::string& text);
};

// Built-in cross-validation layouts. Recognized ids: IEMOCAP, IMPROV,
// CREMA-D, IEMOCAP-CH3 (case-insensitive). The seed is recorded in the dev
// rule for layouts that carve dev from train; it is ignored otherwise.
PartitionManifest standard_partition(const std::string& dataset_id,
                                     std::uint64_t seed = 0);

}  // namespace serkit
