#include "serkit/corpus.hpp"

#include <algorithm>
#include <set>

#include "serkit/io.hpp"
#include "serkit/rng.hpp"

namespace serkit {

ClassSet::ClassSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2)
    throw InputError("class set needs at least 2 classes, got " +
                     std::to_string(names_.size()));
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw InputError("class set: empty class name");
    auto [it, fresh] = index_.emplace(names_[i], static_cast<int>(i));
    (void)it;
    if (!fresh) throw InputError("class set: duplicate class '" + names_[i] + "'");
  }
}

int ClassSet::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

Corpus::Corpus(ClassSet classes, std::vector<Utterance> utterances,
               std::string name)
    : classes_(std::move(classes)),
      utterances_(std::move(utterances)),
      name_(std::move(name)) {
  std::sort(utterances_.begin(), utterances_.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    auto& u = utterances_[i];
    if (u.id.empty()) throw InputError("corpus: utterance with empty id");
    auto [it, fresh] = index_.emplace(u.id, i);
    (void)it;
    if (!fresh) throw InputError("corpus: duplicate utterance id '" + u.id + "'");
    std::sort(u.ratings.begin(), u.ratings.end(),
              [](const Rating& a, const Rating& b) {
                return a.rater_id < b.rater_id;
              });
    for (std::size_t r = 0; r + 1 < u.ratings.size(); ++r)
      if (u.ratings[r].rater_id == u.ratings[r + 1].rater_id)
        throw InputError("corpus: rater '" + u.ratings[r].rater_id +
                         "' rated utterance '" + u.id + "' more than once");
    // Indices are recomputed against this corpus's class set, so utterances
    // moved between corpora stay consistent.
    for (auto& rating : u.ratings)
      rating.class_index = classes_.index_of(rating.class_name);
  }
}

const Utterance* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &utterances_[it->second];
}

Corpus load_annotations(const std::string& path, const ClassSet& classes,
                        const CsvSchema& schema, std::string name) {
  auto rows = parse_delimited(read_file(path));
  if (rows.empty()) throw InputError(path + ": empty annotation file");
  const auto& header = rows[0];
  auto col = [&](const std::string& want) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == want) return static_cast<int>(i);
    return -1;
  };
  int c_utt = col(schema.utterance_id);
  int c_rater = col(schema.rater_id);
  int c_class = col(schema.class_name);
  int c_session = col(schema.session);  // optional
  int c_speaker = col(schema.speaker);  // optional
  if (c_utt < 0 || c_rater < 0 || c_class < 0)
    throw InputError(path + ": header must name columns '" +
                     schema.utterance_id + "', '" + schema.rater_id +
                     "', '" + schema.class_name + "'");

  std::vector<Utterance> utts;
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    std::string loc = path + " row " + std::to_string(r + 1);
    if (f.size() != header.size())
      throw InputError(loc + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(f.size()));
    const std::string& uid = f[static_cast<std::size_t>(c_utt)];
    const std::string& rater = f[static_cast<std::size_t>(c_rater)];
    const std::string& cls = f[static_cast<std::size_t>(c_class)];
    if (uid.empty()) throw InputError(loc + ": empty utterance id");
    if (rater.empty()) throw InputError(loc + ": empty rater id");
    if (cls.empty()) throw InputError(loc + ": empty class");

    auto [it, fresh] = where.emplace(uid, utts.size());
    if (fresh) {
      Utterance u;
      u.id = uid;
      if (c_session >= 0) u.session = f[static_cast<std::size_t>(c_session)];
      if (c_speaker >= 0) u.speaker = f[static_cast<std::size_t>(c_speaker)];
      utts.push_back(std::move(u));
    }
    Utterance& u = utts[it->second];
    if (c_session >= 0 && u.session != f[static_cast<std::size_t>(c_session)])
      throw InputError(loc + ": utterance '" + uid +
                       "' has conflicting session values");
    if (c_speaker >= 0 && u.speaker != f[static_cast<std::size_t>(c_speaker)])
      throw InputError(loc + ": utterance '" + uid +
                       "' has conflicting speaker values");
    for (const auto& existing : u.ratings)
      if (existing.rater_id == rater)
        throw InputError(loc + ": duplicate rating by '" + rater +
                         "' on utterance '" + uid + "'");
    u.ratings.push_back(Rating{rater, cls, classes.index_of(cls)});
  }
  return Corpus(classes, std::move(utts), std::move(name));
}

std::string corpus_to_csv(const Corpus& c) {
  std::string out = "utterance_id,rater_id,class,session,speaker\n";
  for (const auto& u : c.utterances())
    for (const auto& r : u.ratings) {
      out += u.id;
      out += ',';
      out += r.rater_id;
      out += ',';
      out += r.class_name;
      out += ',';
      out += u.session;
      out += ',';
      out += u.speaker;
      out += '\n';
    }
  return out;
}

void save_corpus(const Corpus& c, const std::string& path) {
  write_file_atomic(path, corpus_to_csv(c));
}

VoteCount vote_counts(const Utterance& u, const ClassSet& classes) {
  VoteCount vc;
  vc.counts.assign(classes.size(), 0);
  for (const auto& r : u.ratings) {
    ++vc.total_all;
    int idx = classes.index_of(r.class_name);
    if (idx >= 0) {
      ++vc.counts[static_cast<std::size_t>(idx)];
      ++vc.total_in_set;
    }
  }
  return vc;
}

Corpus subsample(const Corpus& c, std::size_t n, std::uint64_t seed) {
  if (n > c.size())
    throw InputError("subsample: requested " + std::to_string(n) +
                     " utterances from a corpus of " +
                     std::to_string(c.size()));
  std::vector<std::size_t> idx(c.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);
  std::vector<Utterance> picked;
  picked.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    picked.push_back(c.utterances()[idx[i]]);
  return Corpus(c.classes(), std::move(picked), c.name());
}

Corpus rater_view(const Corpus& c, const std::string& rater_id) {
  std::vector<Utterance> out;
  for (const auto& u : c.utterances())
    for (const auto& r : u.ratings)
      if (r.rater_id == rater_id) {
        Utterance v;
        v.id = u.id;
        v.session = u.session;
        v.speaker = u.speaker;
        v.ratings.push_back(r);
        out.push_back(std::move(v));
        break;
      }
  if (out.empty())
    throw InputError("rater view: no ratings by rater '" + rater_id + "'");
  return Corpus(c.classes(), std::move(out), c.name());
}

std::vector<std::string> rater_ids(const Corpus& c) {
  std::set<std::string> seen;
  for (const auto& u : c.utterances())
    for (const auto& r : u.ratings) seen.insert(r.rater_id);
  return std::vector<std::string>(seen.begin(), seen.end());
}

}  // namespace serkit
