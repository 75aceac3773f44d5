#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "bicoref/cli.h"
#include "bicoref/document.h"

using namespace bicoref;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bicoref");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// One small trained model shared by the cases below.
struct Workspace {
  fs::path dir;
  std::string corpus, config, checkpoint;

  Workspace() {
    dir = fs::temp_directory_path() / "bicoref_cli_test";
    fs::remove_all(dir);
    REQUIRE(run({"synth", "--seed", "3", "--docs", "4", "--out", dir.string()}).code == kExitOk);
    corpus = (dir / "train.jsonl").string();
    config = (dir / "model.cfg").string();
    checkpoint = (dir / "model.ckpt").string();
    const Run t = run({"train", "--config", config, "--train", corpus, "--checkpoint", checkpoint, "--max-steps", "6"});
    REQUIRE_MESSAGE(t.code == kExitOk, t.err);
  }
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const Workspace& w = workspace();
  CHECK(run({}).code == kExitInvalid);
  CHECK(run({"frobnicate"}).code == kExitInvalid);
  const Run missing = run({"train", "--config", w.config, "--train", "/nonexistent/train.jsonl", "--checkpoint",
                           (w.dir / "x.ckpt").string()});
  CHECK(missing.code == kExitInvalid);
  CHECK(missing.err.find("/nonexistent/train.jsonl") != std::string::npos);
  CHECK(run({"predict", "--checkpoint", "/nonexistent.ckpt", w.corpus, "--out", (w.dir / "p.jsonl").string()}).code ==
        kExitInvalid);

  const fs::path bad_cfg = w.dir / "bad.cfg";
  std::ofstream(bad_cfg) << "no_such_key = 1\n";
  CHECK(run({"train", "--config", bad_cfg.string(), "--train", w.corpus, "--checkpoint", (w.dir / "x.ckpt").string()})
            .code == kExitInvalid);

  const fs::path broken = w.dir / "broken.jsonl";
  std::ofstream(broken) << "{\"doc_key\": 1}\n";
  CHECK(run({"score", broken.string(), broken.string()}).code == kExitInvalid);
}

TEST_CASE("training writes a loss log and checkpoint") {
  const Workspace& w = workspace();
  CHECK(fs::exists(w.checkpoint));
  const std::string log = slurp(w.checkpoint + ".loss.csv");
  CHECK(log.rfind("step,L_detect_sum,L_cluster_sum,L_loss\n", 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 7);
}

TEST_CASE("ablation flags train") {
  const Workspace& w = workspace();
  const std::string ckpt = (w.dir / "ablation.ckpt").string();
  for (const std::vector<std::string>& extra : {std::vector<std::string>{"--lambda-detection", "0"},
                                                std::vector<std::string>{"--no-biaffine"},
                                                std::vector<std::string>{"--no-pair-features"}}) {
    std::vector<std::string> args{"train", "--config", w.config, "--train", w.corpus, "--checkpoint", ckpt,
                                  "--max-steps", "2"};
    args.insert(args.end(), extra.begin(), extra.end());
    const Run r = run(args);
    CHECK_MESSAGE(r.code == kExitOk, r.err);
    const fs::path out = w.dir / "ablation_pred.jsonl";
    CHECK(run({"predict", "--checkpoint", ckpt, w.corpus, "--out", out.string()}).code == kExitOk);
  }
}

TEST_CASE("non-finite loss exits with 3 and keeps a checkpoint") {
  const Workspace& w = workspace();
  const std::string ckpt = (w.dir / "nan.ckpt").string();
  const Run r = run({"train", "--config", w.config, "--train", w.corpus, "--checkpoint", ckpt, "--max-steps", "20",
                     "--learning-rate", "1e300"});
  CHECK(r.code == kExitNonFinite);
  CHECK(r.err.find("non-finite") != std::string::npos);
  CHECK(fs::exists(ckpt));
}

TEST_CASE("prediction") {
  const Workspace& w = workspace();
  const fs::path a = w.dir / "a.jsonl", b = w.dir / "b.jsonl";
  CHECK(run({"predict", "--checkpoint", w.checkpoint, w.corpus, "--out", a.string()}).code == kExitOk);
  CHECK(run({"predict", "--checkpoint", w.checkpoint, w.corpus, "--out", b.string()}).code == kExitOk);
  CHECK(slurp(a) == slurp(b));
  const CorpusSplit predicted = load_documents(a);
  CHECK(predicted.documents.size() == 4);
  for (const Document& d : predicted.documents) CHECK(d.predicted_clusters.has_value());

  const fs::path empty = w.dir / "empty.jsonl", empty_out = w.dir / "empty_out.jsonl";
  std::ofstream(empty).flush();
  CHECK(run({"predict", "--checkpoint", w.checkpoint, empty.string(), "--out", empty_out.string()}).code == kExitOk);
  CHECK(fs::exists(empty_out));
  CHECK(fs::file_size(empty_out) == 0);
}

TEST_CASE("checkpoint version mismatch is rejected") {
  const Workspace& w = workspace();
  const fs::path tampered = w.dir / "tampered.ckpt";
  std::string bytes = slurp(w.checkpoint);
  bytes[4] = static_cast<char>(bytes[4] + 7);
  std::ofstream(tampered, std::ios::binary) << bytes;
  const Run r = run({"predict", "--checkpoint", tampered.string(), w.corpus, "--out", (w.dir / "t.jsonl").string()});
  CHECK(r.code == kExitInvalid);
  CHECK(r.err.find("version") != std::string::npos);
}

TEST_CASE("scoring") {
  const Workspace& w = workspace();
  const Run same = run({"score", w.corpus, w.corpus, "--out", (w.dir / "score.json").string()});
  CHECK(same.code == kExitOk);
  CHECK(same.out.find("1.000") != std::string::npos);
  CHECK(same.out.find("0.") == std::string::npos);
  std::ifstream js(w.dir / "score.json");
  CHECK(nlohmann::json::parse(js)["average_f1"] == 1.0);

  const Run boot = run({"score", w.corpus, w.corpus, "--bootstrap", w.corpus, "--resamples", "500"});
  CHECK(boot.code == kExitOk);
  CHECK(boot.out.find("no significant difference") != std::string::npos);

  // the worked example
  Document g;
  g.doc_key = "w";
  g.sentences = {{"a", "b", "c", "d", "e"}};
  g.speakers = {{"-", "-", "-", "-", "-"}};
  g.clusters = {{{0, 0}, {1, 1}, {2, 2}}, {{3, 3}, {4, 4}}};
  Document s = g;
  s.clusters = {{{0, 0}, {1, 1}}, {{2, 2}, {3, 3}, {4, 4}}};
  write_documents(w.dir / "g.jsonl", {g});
  write_documents(w.dir / "s.jsonl", {s});
  const Run worked = run({"score", (w.dir / "g.jsonl").string(), (w.dir / "s.jsonl").string()});
  CHECK(worked.out.find("0.667") != std::string::npos);
  CHECK(worked.out.find("0.733") != std::string::npos);
  CHECK(worked.out.find("0.800") != std::string::npos);

  Document other = g;
  other.doc_key = "zz";
  write_documents(w.dir / "o.jsonl", {other});
  const Run mismatch = run({"score", (w.dir / "g.jsonl").string(), (w.dir / "o.jsonl").string()});
  CHECK(mismatch.code == kExitInvalid);
  CHECK(mismatch.err.find("zz") != std::string::npos);
}

TEST_CASE("mention report") {
  const Workspace& w = workspace();
  const fs::path csv = w.dir / "widths.csv";
  const Run r = run({"report", "--checkpoint", w.checkpoint, w.corpus, "--train", w.corpus, "--out", csv.string()});
  CHECK(r.code == kExitOk);
  CHECK(slurp(csv).rfind("width,frequency,accuracy\n", 0) == 0);
}

TEST_CASE("gradcheck passes and catches a corrupted backward rule") {
  const Run ok = run({"gradcheck"});
  CHECK(ok.code == kExitOk);
  for (const char* group : {"encoder/char_embeddings", "span/mention_projection", "antecedent/U_bi",
                            "antecedent/v_bi", "features/pair_projection"})
    CHECK_MESSAGE(ok.out.find(group) != std::string::npos, group);
  for (const char* target : {"relu", "tanh", "sigmoid"}) {
    const Run bad = run({"gradcheck", "--inject-fault", target});
    CHECK_MESSAGE(bad.code == kExitFailure, target);
    CHECK(bad.out.find("FAIL") != std::string::npos);
  }
}
