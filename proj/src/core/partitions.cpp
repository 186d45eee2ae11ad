#include "serkit/partitions.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "serkit/errors.hpp"

namespace serkit {

namespace {

using nlohmann::json;

std::vector<std::string> sessions(std::initializer_list<int> nums) {
  std::vector<std::string> out;
  for (int n : nums) out.push_back("Ses." + std::to_string(n));
  return out;
}

std::vector<std::string> speaker_range(int lo, int hi) {
  std::vector<std::string> out;
  for (int s = lo; s <= hi; ++s) out.push_back(std::to_string(s));
  return out;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

PartitionManifest iemocap() {
  PartitionManifest m;
  m.dataset_id = "IEMOCAP";
  m.selector = "session";
  // Session 5 is held out first and the dev session trails the test session
  // cyclically. The source table's last fold omits session 5 and repeats
  // session 4; emitted here with train {1,2,5} so folds stay disjoint and
  // every session is tested exactly once.
  m.folds = {
      {sessions({1, 2, 3}), sessions({4}), sessions({5})},
      {sessions({2, 3, 4}), sessions({5}), sessions({1})},
      {sessions({3, 4, 5}), sessions({1}), sessions({2})},
      {sessions({1, 4, 5}), sessions({2}), sessions({3})},
      {sessions({1, 2, 5}), sessions({3}), sessions({4})},
  };
  return m;
}

PartitionManifest improv() {
  PartitionManifest m;
  m.dataset_id = "IMPROV";
  m.selector = "session";
  m.folds = {
      {sessions({1, 2, 3, 4}), sessions({5}), sessions({6})},
      {sessions({1, 2, 3, 6}), sessions({4}), sessions({5})},
      {sessions({1, 2, 5, 6}), sessions({3}), sessions({4})},
      {sessions({1, 4, 5, 6}), sessions({2}), sessions({3})},
      {sessions({3, 4, 5, 6}), sessions({1}), sessions({2})},
      {sessions({2, 3, 4, 5}), sessions({6}), sessions({1})},
  };
  return m;
}

PartitionManifest crema_d() {
  PartitionManifest m;
  m.dataset_id = "CREMA-D";
  m.selector = "speaker";
  m.sessions = {
      {"Ses.1", {speaker_range(1037, 1054), 7, 11}},
      {"Ses.2", {speaker_range(1001, 1018), 12, 6}},
      {"Ses.3", {speaker_range(1073, 1091), 13, 6}},
      {"Ses.4", {speaker_range(1055, 1072), 9, 9}},
      {"Ses.5", {speaker_range(1019, 1036), 15, 3}},
  };
  // Same rotation as IEMOCAP, with each session expanded to its speaker ids
  // so the fold entries match corpus speaker fields directly.
  const int test_of[5] = {5, 1, 2, 3, 4};
  const int dev_of[5] = {4, 5, 1, 2, 3};
  for (int f = 0; f < 5; ++f) {
    Fold fold;
    for (int s = 1; s <= 5; ++s) {
      const auto& spk = m.sessions.at("Ses." + std::to_string(s)).speakers;
      auto& bucket = s == test_of[f]  ? fold.test
                     : s == dev_of[f] ? fold.dev
                                      : fold.train;
      bucket.insert(bucket.end(), spk.begin(), spk.end());
    }
    m.folds.push_back(std::move(fold));
  }
  return m;
}

PartitionManifest iemocap_ch3(std::uint64_t seed) {
  PartitionManifest m;
  m.dataset_id = "IEMOCAP-CH3";
  m.selector = "session";
  // Four sessions train, the fifth tests; dev is carved from train at
  // application time as a seeded random 10%. The source table's last fold
  // again repeats session 4 on both sides; emitted with train {1,2,3,5}.
  m.folds = {
      {sessions({1, 2, 3, 4}), {}, sessions({5})},
      {sessions({2, 3, 4, 5}), {}, sessions({1})},
      {sessions({3, 4, 5, 1}), {}, sessions({2})},
      {sessions({1, 4, 5, 2}), {}, sessions({3})},
      {sessions({1, 2, 5, 3}), {}, sessions({4})},
  };
  m.dev_rule = DevRule{0.1, seed};
  return m;
}

}  // namespace

void PartitionManifest::validate() const {
  if (folds.empty()) throw InputError("partition: no folds");
  std::set<std::string> all;
  for (const auto& f : folds) {
    for (const auto* part : {&f.train, &f.dev, &f.test}) {
      std::set<std::string> s(part->begin(), part->end());
      if (s.size() != part->size())
        throw InputError("partition: duplicate selector within a fold part");
      all.insert(s.begin(), s.end());
    }
    std::set<std::string> tr(f.train.begin(), f.train.end());
    for (const auto& d : f.dev)
      if (tr.count(d))
        throw InputError("partition: selector '" + d + "' in both train and dev");
    for (const auto& t : f.test) {
      if (tr.count(t))
        throw InputError("partition: selector '" + t + "' in both train and test");
      for (const auto& d : f.dev)
        if (d == t)
          throw InputError("partition: selector '" + t + "' in both dev and test");
    }
  }
  std::map<std::string, int> tested;
  for (const auto& f : folds)
    for (const auto& t : f.test) ++tested[t];
  for (const auto& sel : all) {
    auto it = tested.find(sel);
    if (it == tested.end())
      throw InputError("partition: selector '" + sel + "' never appears in a test set");
    if (it->second != 1)
      throw InputError("partition: selector '" + sel + "' tested " +
                       std::to_string(it->second) + " times");
  }
}

std::string PartitionManifest::to_json() const {
  json j;
  j["dataset_id"] = dataset_id;
  j["selector"] = selector;
  j["folds"] = json::array();
  for (const auto& f : folds)
    j["folds"].push_back(
        {{"train", f.train}, {"dev", f.dev}, {"test", f.test}});
  if (dev_rule) {
    j["dev_rule"] = {{"kind", "random-train-fraction"},
                     {"fraction", dev_rule->fraction},
                     {"seed", dev_rule->seed}};
  }
  if (!sessions.empty()) {
    json s = json::object();
    for (const auto& [name, info] : sessions)
      s[name] = {{"speakers", info.speakers},
                 {"males", info.males},
                 {"females", info.females}};
    j["sessions"] = s;
  }
  return j.dump(2) + "\n";
}

PartitionManifest PartitionManifest::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("partition manifest: bad JSON: ") + e.what());
  }
  try {
    PartitionManifest m;
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.selector = j.at("selector").get<std::string>();
    for (const auto& f : j.at("folds")) {
      Fold fold;
      fold.train = f.at("train").get<std::vector<std::string>>();
      fold.dev = f.at("dev").get<std::vector<std::string>>();
      fold.test = f.at("test").get<std::vector<std::string>>();
      m.folds.push_back(std::move(fold));
    }
    if (j.contains("dev_rule"))
      m.dev_rule = DevRule{j["dev_rule"].at("fraction").get<double>(),
                           j["dev_rule"].at("seed").get<std::uint64_t>()};
    if (j.contains("sessions"))
      for (const auto& [name, info] : j["sessions"].items())
        m.sessions[name] =
            SessionInfo{info.at("speakers").get<std::vector<std::string>>(),
                        info.at("males").get<int>(),
                        info.at("females").get<int>()};
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("partition manifest: missing field: ") + e.what());
  }
}

PartitionManifest standard_partition(const std::string& dataset_id,
                                     std::uint64_t seed) {
  std::string id = upper(dataset_id);
  PartitionManifest m;
  if (id == "IEMOCAP")
    m = iemocap();
  else if (id == "IMPROV")
    m = improv();
  else if (id == "CREMA-D" || id == "CREMAD")
    m = crema_d();
  else if (id == "IEMOCAP-CH3")
    m = iemocap_ch3(seed);
  else
    throw InputError("unknown dataset id '" + dataset_id +
                     "' (expected IEMOCAP, IMPROV, CREMA-D, or IEMOCAP-CH3)");
  m.validate();
  return m;
}

}  // namespace serkit
