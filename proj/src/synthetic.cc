#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <variant>

#include "bicoref/document.h"

namespace bicoref {
namespace {

const std::vector<std::string> kMaleFirst = {"Gary", "Robert", "Philip", "David", "Michael", "James",
                                             "Peter", "Mark", "Thomas", "George", "Henry", "Frank"};
const std::vector<std::string> kFemaleFirst = {"Mary", "Susan", "Linda", "Karen", "Laura", "Alice",
                                               "Emma", "Julia", "Nancy", "Helen", "Sarah", "Anna"};
const std::vector<std::string> kLast = {"Wilber", "Lyons", "Baker", "Carter", "Hughes", "Foster",
                                        "Morgan", "Reed", "Price", "Turner", "Hayes", "Brooks",
                                        "Ward", "Cole", "Grant", "Shaw"};
const std::vector<std::string> kOrgHead = {"Emporium", "Acme", "Pacific", "Summit", "Atlas", "Vertex",
                                           "Harbor", "Sterling", "Orion", "Keystone", "Granite", "Beacon"};
const std::vector<std::string> kOrgSuffix = {"Inc.", "Corp.", "Group"};
const std::vector<std::string> kOrgNoun = {"company", "firm"};

enum class Kind { kMale, kFemale, kOrg };
enum class Role { kSubject, kObject };

// A template token is either a literal word or a mention slot.
struct Slot {
  Role role;
};
using TemplateToken = std::variant<std::string, Slot>;

std::vector<std::vector<TemplateToken>> templates() {
  const Slot s{Role::kSubject};
  const Slot o{Role::kObject};
  using T = TemplateToken;
  return {
      {s, T("said"), o, T("was"), T("named"), T("chief"), T(".")},
      {s, T("met"), T("with"), o, T("on"), T("Monday"), T(".")},
      {s, T("praised"), o, T("again"), T(".")},
      {s, T("thanked"), o, T(".")},
      {T("Later"), T(","), s, T("called"), o, T(".")},
      {s, T("remains"), T("chairman"), T(".")},
      {s, T("visited"), T("the"), T("office"), T("yesterday"), T(".")},
      {s, T("hired"), o, T("last"), T("year"), T(".")},
  };
}

struct Entity {
  Kind kind;
  std::vector<std::string> full;   // first-mention form
  std::vector<std::string> short_form;
};

template <typename T>
const T& pick(const std::vector<T>& pool, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
  return pool[d(rng)];
}

std::vector<std::string> truncate(const std::vector<std::string>& pool, std::size_t n) {
  n = std::clamp<std::size_t>(n, 2, pool.size());
  return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<std::string> later_form(const Entity& e, Role role, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 2);
  const int form = d(rng);
  if (form == 0) return e.full;
  if (form == 1) return e.short_form;
  switch (e.kind) {
    case Kind::kMale:
      return {role == Role::kSubject ? "he" : "him"};
    case Kind::kFemale:
      return {role == Role::kSubject ? "she" : "her"};
    case Kind::kOrg:
      return {"it"};
  }
  return e.full;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

CorpusSplit generate_synthetic_corpus(std::uint64_t seed, int n_docs, int vocab_size, int max_sentences) {
  if (n_docs <= 0 || vocab_size <= 0 || max_sentences <= 0)
    throw std::invalid_argument("generate_synthetic_corpus: counts must be positive");
  std::mt19937_64 rng(seed);

  // About 45 function words are fixed; the remaining budget goes to names.
  const std::size_t name_budget = vocab_size > 45 ? static_cast<std::size_t>(vocab_size - 45) : 8;
  const auto male = truncate(kMaleFirst, name_budget / 4);
  const auto female = truncate(kFemaleFirst, name_budget / 4);
  const auto last = truncate(kLast, name_budget / 4);
  const auto org = truncate(kOrgHead, name_budget - 3 * (name_budget / 4));
  const auto tmpl = templates();

  CorpusSplit split;
  split.name = "synthetic";
  for (int d = 0; d < n_docs; ++d) {
    // One entity of each kind at most, so pronouns are unambiguous.
    std::vector<Entity> entities;
    {
      const std::string m_last = pick(last, rng);
      std::string f_last = pick(last, rng);
      while (f_last == m_last) f_last = pick(last, rng);
      entities.push_back({Kind::kMale, {pick(male, rng), m_last}, {"Mr.", m_last}});
      entities.push_back({Kind::kFemale, {pick(female, rng), f_last}, {f_last}});
      const std::string head = pick(org, rng);
      entities.push_back({Kind::kOrg, {head, pick(kOrgSuffix, rng)}, {"the", pick(kOrgNoun, rng)}});
      std::shuffle(entities.begin(), entities.end(), rng);
      std::uniform_int_distribution<int> keep(2, 3);
      entities.resize(static_cast<std::size_t>(keep(rng)));
    }

    std::uniform_int_distribution<int> n_sent_dist(std::min(2, max_sentences), max_sentences);
    const int n_sent = n_sent_dist(rng);
    std::vector<const std::vector<TemplateToken>*> chosen;
    std::size_t n_slots = 0;
    for (int s = 0; s < n_sent; ++s) {
      chosen.push_back(&pick(tmpl, rng));
      for (const auto& t : *chosen.back()) n_slots += std::holds_alternative<Slot>(t) ? 1 : 0;
    }
    if (n_slots < 2) {
      chosen.back() = &tmpl[3];
      n_slots = 0;
      for (const auto* c : chosen)
        for (const auto& t : *c) n_slots += std::holds_alternative<Slot>(t) ? 1 : 0;
    }

    // Every entity that fits gets two mentions; the rest are random.
    std::vector<int> owner;
    for (std::size_t e = 0; e < entities.size() && owner.size() + 2 <= n_slots; ++e) {
      owner.push_back(static_cast<int>(e));
      owner.push_back(static_cast<int>(e));
    }
    std::uniform_int_distribution<int> any_entity(0, static_cast<int>(entities.size()) - 1);
    while (owner.size() < n_slots) owner.push_back(any_entity(rng));
    std::shuffle(owner.begin(), owner.end(), rng);

    Document doc;
    doc.doc_key = "synth/" + std::to_string(seed) + "/" + std::to_string(d);
    static const std::array<std::string, 4> kGenres = {"nw", "bc", "bn", "mz"};
    doc.genre = kGenres[static_cast<std::size_t>(d) % kGenres.size()];
    std::vector<std::vector<TokenSpan>> mentions(entities.size());
    std::vector<bool> introduced(entities.size(), false);
    int token = 0;
    std::size_t slot = 0;
    for (const auto* t : chosen) {
      std::vector<std::string> sentence;
      for (const auto& piece : *t) {
        if (const auto* word = std::get_if<std::string>(&piece)) {
          sentence.push_back(*word);
          ++token;
          continue;
        }
        const auto e = static_cast<std::size_t>(owner[slot++]);
        const auto words = introduced[e] ? later_form(entities[e], std::get<Slot>(piece).role, rng)
                                         : entities[e].full;
        introduced[e] = true;
        mentions[e].push_back({token, token + static_cast<int>(words.size()) - 1});
        sentence.insert(sentence.end(), words.begin(), words.end());
        token += static_cast<int>(words.size());
      }
      doc.speakers.emplace_back(sentence.size(), "-");
      doc.sentences.push_back(std::move(sentence));
    }
    for (auto& m : mentions)
      if (m.size() >= 2) doc.clusters.push_back(std::move(m));
    validate(doc);
    split.documents.push_back(std::move(doc));
  }
  return split;
}

std::vector<std::string> vocabulary(const std::vector<Document>& docs) {
  std::set<std::string> words;
  for (const auto& d : docs)
    for (const auto& s : d.sentences) words.insert(s.begin(), s.end());
  return {words.begin(), words.end()};
}

EmbeddingTable synthetic_embeddings(const std::vector<Document>& docs, std::size_t dimension,
                                    std::uint64_t seed) {
  EmbeddingTable table(dimension);
  const double sd = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(dimension, 1)));
  for (const auto& w : vocabulary(docs)) {
    std::mt19937_64 rng(fnv1a(w) ^ seed);
    std::normal_distribution<double> dist(0.0, sd);
    std::vector<double> v(dimension);
    for (double& x : v) x = dist(rng);
    table.insert(w, std::move(v));
  }
  return table;
}

}  // namespace bicoref
