#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bicoref {

// Inclusive token range over the flattened document.
struct TokenSpan {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }
  auto operator<=>(const TokenSpan&) const = default;
};

using Cluster = std::vector<TokenSpan>;

struct Document {
  std::string doc_key;
  std::string genre;
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::vector<std::string>> speakers;
  std::vector<Cluster> clusters;
  // Present only on prediction output.
  std::optional<std::vector<Cluster>> predicted_clusters;

  std::size_t token_count() const;
  // Sentence index of every flattened token.
  std::vector<int> sentence_of_token() const;
  std::vector<std::string> flat_tokens() const;
  std::vector<std::string> flat_speakers() const;
  std::string span_text(TokenSpan span) const;

  bool operator==(const Document&) const = default;
};

struct CorpusSplit {
  std::string name;
  std::vector<Document> documents;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws FormatError describing the first violated invariant.
void validate(const Document& doc);

Document parse_document(const std::string& json_line);
std::string serialize_document(const Document& doc);

// One JSON object per line; blank lines are skipped. Errors carry the line
// number.
CorpusSplit load_documents(const std::filesystem::path& path, const std::string& split_name = "");
void write_documents(const std::filesystem::path& path, const std::vector<Document>& docs);

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension = 0) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& word) const { return vectors_.count(word) > 0; }
  // Out-of-vocabulary words map to the zero vector.
  std::vector<double> lookup(const std::string& word) const;
  // Keeps the first vector inserted for a word.
  void insert(const std::string& word, std::vector<double> vec);

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Text format: word followed by exactly `dimension` reals per line.
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t dimension);
void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table,
                      const std::vector<std::string>& order);

// Templated documents about recurring people and organizations. Clusters are
// singleton-free; every document has at least one cluster of size >= 2.
CorpusSplit generate_synthetic_corpus(std::uint64_t seed, int n_docs, int vocab_size,
                                      int max_sentences);

// Deterministic pseudo-random vectors for every word of a corpus, standing in
// for pretrained tables when none are available.
EmbeddingTable synthetic_embeddings(const std::vector<Document>& docs, std::size_t dimension,
                                    std::uint64_t seed);
std::vector<std::string> vocabulary(const std::vector<Document>& docs);

}  // namespace bicoref
