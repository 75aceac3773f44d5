#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bicoref/document.h"
#include "json.hpp"

namespace bicoref {

using json = nlohmann::ordered_json;

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<int> Document::sentence_of_token() const {
  std::vector<int> out;
  out.reserve(token_count());
  for (std::size_t s = 0; s < sentences.size(); ++s)
    out.insert(out.end(), sentences[s].size(), static_cast<int>(s));
  return out;
}

std::vector<std::string> Document::flat_tokens() const {
  std::vector<std::string> out;
  out.reserve(token_count());
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<std::string> Document::flat_speakers() const {
  std::vector<std::string> out;
  out.reserve(token_count());
  for (const auto& s : speakers) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::string Document::span_text(TokenSpan span) const {
  const auto tokens = flat_tokens();
  std::string out;
  for (int t = span.start; t <= span.end; ++t) {
    if (t > span.start) out += ' ';
    out += tokens.at(static_cast<std::size_t>(t));
  }
  return out;
}

namespace {

void validate_clusters(const std::vector<Cluster>& clusters, const std::vector<int>& sentence_of,
                       const char* field) {
  const int n_tokens = static_cast<int>(sentence_of.size());
  std::set<TokenSpan> seen;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty())
      throw FormatError(std::string(field) + ": cluster " + std::to_string(c) + " is empty");
    for (const TokenSpan& sp : clusters[c]) {
      const std::string where = std::string(field) + ": span (" + std::to_string(sp.start) + ", " +
                                std::to_string(sp.end) + ")";
      if (sp.start < 0 || sp.end >= n_tokens) throw FormatError(where + " lies outside the document");
      if (sp.end < sp.start) throw FormatError(where + " has end < start");
      if (sentence_of[static_cast<std::size_t>(sp.start)] != sentence_of[static_cast<std::size_t>(sp.end)])
        throw FormatError(where + " crosses a sentence boundary");
      if (!seen.insert(sp).second) throw FormatError(where + " appears in more than one cluster slot");
    }
  }
}

std::vector<Cluster> clusters_from_json(const json& j, const char* field) {
  if (!j.is_array()) throw FormatError(std::string(field) + " must be an array");
  std::vector<Cluster> out;
  for (const auto& cj : j) {
    if (!cj.is_array()) throw FormatError(std::string(field) + ": each cluster must be an array");
    Cluster c;
    for (const auto& sj : cj) {
      if (!sj.is_array() || sj.size() != 2 || !sj[0].is_number_integer() || !sj[1].is_number_integer())
        throw FormatError(std::string(field) + ": each mention must be [start, end]");
      c.push_back({sj[0].get<int>(), sj[1].get<int>()});
    }
    out.push_back(std::move(c));
  }
  return out;
}

json clusters_to_json(const std::vector<Cluster>& clusters) {
  json out = json::array();
  for (const auto& c : clusters) {
    json cj = json::array();
    for (const auto& sp : c) cj.push_back(json::array({sp.start, sp.end}));
    out.push_back(std::move(cj));
  }
  return out;
}

}  // namespace

void validate(const Document& doc) {
  if (doc.doc_key.empty()) throw FormatError("doc_key is empty");
  if (doc.sentences.empty()) throw FormatError("document has no sentences");
  if (doc.speakers.size() != doc.sentences.size())
    throw FormatError("speakers has " + std::to_string(doc.speakers.size()) + " sentences, expected " +
                      std::to_string(doc.sentences.size()));
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    if (doc.sentences[s].empty()) throw FormatError("sentence " + std::to_string(s) + " is empty");
    if (doc.speakers[s].size() != doc.sentences[s].size())
      throw FormatError("speakers of sentence " + std::to_string(s) + " do not align with its tokens");
  }
  const auto sentence_of = doc.sentence_of_token();
  validate_clusters(doc.clusters, sentence_of, "clusters");
  if (doc.predicted_clusters) validate_clusters(*doc.predicted_clusters, sentence_of, "predicted_clusters");
}

Document parse_document(const std::string& json_line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("record is not a JSON object");
  Document doc;
  try {
    doc.doc_key = j.at("doc_key").get<std::string>();
    doc.genre = j.value("genre", std::string());
    doc.sentences = j.at("sentences").get<std::vector<std::vector<std::string>>>();
    if (j.contains("speakers")) {
      doc.speakers = j.at("speakers").get<std::vector<std::vector<std::string>>>();
    } else {
      for (const auto& s : doc.sentences) doc.speakers.emplace_back(s.size(), "-");
    }
    doc.clusters = clusters_from_json(j.value("clusters", json::array()), "clusters");
    if (j.contains("predicted_clusters"))
      doc.predicted_clusters = clusters_from_json(j.at("predicted_clusters"), "predicted_clusters");
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad field: ") + e.what());
  }
  validate(doc);
  return doc;
}

std::string serialize_document(const Document& doc) {
  json j;
  j["doc_key"] = doc.doc_key;
  j["genre"] = doc.genre;
  j["sentences"] = doc.sentences;
  j["speakers"] = doc.speakers;
  j["clusters"] = clusters_to_json(doc.clusters);
  if (doc.predicted_clusters) j["predicted_clusters"] = clusters_to_json(*doc.predicted_clusters);
  return j.dump();
}

CorpusSplit load_documents(const std::filesystem::path& path, const std::string& split_name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open document file: " + path.string());
  CorpusSplit split;
  split.name = split_name;
  std::set<std::string> keys;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Document doc = parse_document(line);
      if (!keys.insert(doc.doc_key).second) throw FormatError("duplicate doc_key " + doc.doc_key);
      split.documents.push_back(std::move(doc));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return split;
}

void write_documents(const std::filesystem::path& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (const auto& d : docs) out << serialize_document(d) << '\n';
}

std::vector<double> EmbeddingTable::lookup(const std::string& word) const {
  auto it = vectors_.find(word);
  if (it == vectors_.end()) return std::vector<double>(dimension_, 0.0);
  return it->second;
}

void EmbeddingTable::insert(const std::string& word, std::vector<double> vec) {
  if (vec.size() != dimension_)
    throw std::invalid_argument("embedding for '" + word + "' has dimension " + std::to_string(vec.size()) +
                                ", table expects " + std::to_string(dimension_));
  vectors_.try_emplace(word, std::move(vec));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t dimension) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path.string());
  EmbeddingTable table(dimension);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> vec;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        vec.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": not a number: " + tok);
      }
    }
    if (vec.size() != dimension)
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(dimension) + " values, found " + std::to_string(vec.size()));
    table.insert(word, std::move(vec));
  }
  return table;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table,
                      const std::vector<std::string>& order) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.precision(17);
  for (const auto& w : order) {
    if (!table.contains(w)) continue;
    out << w;
    for (double v : table.lookup(w)) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace bicoref
