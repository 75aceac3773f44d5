#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bicoref/document.h"
#include "test_support.h"

using namespace bicoref;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << contents;
  return p;
}

}  // namespace

TEST_CASE("empty file gives an empty split") {
  const auto p = temp_file("bicoref_empty.jsonl", "");
  CHECK(load_documents(p, "train").documents.empty());
}

TEST_CASE("worked example parses into its two clusters") {
  const Document d = test::drug_emporium_document();
  const Document parsed = parse_document(serialize_document(d));
  CHECK(parsed == d);
  REQUIRE(parsed.clusters.size() == 2);
  CHECK(parsed.span_text(parsed.clusters[0][0]) == "Drug Emporium Inc.");
  CHECK(parsed.span_text(parsed.clusters[0][1]) == "this drugstore chain");
  CHECK(parsed.span_text(parsed.clusters[0][2]) == "the company");
  CHECK(parsed.span_text(parsed.clusters[0][3]) == "company");
  CHECK(parsed.span_text(parsed.clusters[1][0]) == "Gary Wilber");
  CHECK(parsed.span_text(parsed.clusters[1][1]) == "He");
  CHECK(parsed.span_text(parsed.clusters[1][2]) == "Gary Wilber");
}

TEST_CASE("write then read reproduces documents") {
  std::mt19937_64 rng(1);
  auto corpus = generate_synthetic_corpus(5, 6, 120, 4).documents;
  corpus.push_back(test::drug_emporium_document());
  corpus.back().predicted_clusters = std::vector<Cluster>{{{0, 2}, {10, 12}}};
  const auto p = fs::temp_directory_path() / "bicoref_roundtrip.jsonl";
  write_documents(p, corpus);
  CHECK(load_documents(p).documents == corpus);
}

TEST_CASE("minimal record defaults") {
  const Document d = parse_document(R"({"doc_key": "k", "sentences": [["a", "b"]], "clusters": []})");
  CHECK(d.genre.empty());
  CHECK(d.speakers == std::vector<std::vector<std::string>>{{"-", "-"}});
}

TEST_CASE("validation rejects broken records with line numbers") {
  const std::string good = R"({"doc_key": "a", "sentences": [["x", "y"], ["z"]], "clusters": [[[0, 0], [2, 2]]]})";
  const std::vector<std::string> bad = {
      R"({"doc_key": "b", "sentences": [["x", "y"], ["z"]], "clusters": [[[1, 2]]]})",          // crosses sentence
      R"({"doc_key": "b", "sentences": [["x"]], "clusters": [[[0, 0]], [[0, 0]]]})",             // shared span
      R"({"doc_key": "b", "sentences": [["x"]], "clusters": [[[0, 3]]]})",                       // out of range
      R"({"doc_key": "b", "sentences": [["x", "y"]], "clusters": [[[1, 0]]]})",                  // end < start
      R"({"doc_key": "b", "sentences": [["x"]], "speakers": [["a", "b"]], "clusters": []})",     // speakers misaligned
      R"({"doc_key": "b", "sentences": [["x"]], "clusters": [[]]})",                             // empty cluster
      R"({"doc_key": "b", "sentences": [[]], "clusters": []})",                                  // empty sentence
      R"({"doc_key": "b", "sentences": [["x"]], "clusters": [[[0]]]})",                          // bad mention
      R"(not json)",
  };
  for (const std::string& b : bad) {
    CAPTURE(b);
    const auto p = temp_file("bicoref_bad.jsonl", good + "\n" + b + "\n");
    try {
      load_documents(p);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
  }
  const auto dup = temp_file("bicoref_dup.jsonl", good + "\n" + good + "\n");
  CHECK_THROWS_AS(load_documents(dup), FormatError);
}

TEST_CASE("embeddings") {
  const auto p = temp_file("bicoref_emb.txt", "the 0.1 0.2\ncat 1 2\nthe 9 9\ndog -1 0.5\n");
  const EmbeddingTable t = load_embeddings(p, 2);
  CHECK(t.size() == 3);
  CHECK(t.lookup("the") == std::vector<double>{0.1, 0.2});
  CHECK(t.lookup("unicorn") == std::vector<double>{0.0, 0.0});

  const auto bad = temp_file("bicoref_emb_bad.txt", "a 1 2\nb 1 2 3\n");
  try {
    load_embeddings(bad, 2);
    FAIL("expected an arity error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }

  const auto out = fs::temp_directory_path() / "bicoref_emb_out.txt";
  write_embeddings(out, t, {"the", "cat", "dog"});
  const EmbeddingTable back = load_embeddings(out, 2);
  for (const char* w : {"the", "cat", "dog"}) CHECK(back.lookup(w) == t.lookup(w));
}

TEST_CASE("synthetic corpus contract") {
  const CorpusSplit a = generate_synthetic_corpus(7, 20, 200, 4);
  const CorpusSplit b = generate_synthetic_corpus(7, 20, 200, 4);
  CHECK(a.documents == b.documents);
  CHECK(a.documents.size() == 20);
  CHECK(vocabulary(a.documents).size() <= 200);
  std::size_t mentions = 0, multiword = 0;
  for (const Document& d : a.documents) {
    CHECK_NOTHROW(validate(d));
    bool has_pair = false;
    for (const Cluster& c : d.clusters) {
      CHECK(c.size() >= 2);
      has_pair = has_pair || c.size() >= 2;
      for (const TokenSpan& s : c) {
        ++mentions;
        if (s.width() > 1) ++multiword;
      }
    }
    CHECK(has_pair);
  }
  CHECK(static_cast<double>(multiword) >= 0.3 * static_cast<double>(mentions));
  CHECK(generate_synthetic_corpus(8, 20, 200, 4).documents != a.documents);
}
