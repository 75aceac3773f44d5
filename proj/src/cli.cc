#include "bicoref/cli.h"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "bicoref/decoder.h"
#include "bicoref/gradcheck.h"
#include "bicoref/metrics.h"
#include "bicoref/training.h"

namespace bicoref {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda_detection;
  bool no_biaffine = false;
  bool no_pair_features = false;
  std::optional<int> max_steps;
  std::optional<double> learning_rate;
  std::optional<int> eval_every;
  std::string word_embeddings;
  std::string small_word_embeddings;
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError(what + " path is required");
  if (!fs::is_regular_file(path)) throw UsageError(what + " not found: " + path);
}

std::string resolve(const std::string& path, const fs::path& base) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (base / path).lexically_normal().string();
}

// Config file first, then flags.
void build_configs(const ModelFlags& flags, ModelConfig& model, TrainConfig& train) {
  if (!flags.config_path.empty()) {
    require_file(flags.config_path, "config file");
    const KeyValues kv = read_key_value_file(flags.config_path);
    const auto unknown_model = bicoref::apply(kv, model);
    KeyValues rest;
    for (const auto& k : unknown_model) rest[k] = kv.at(k);
    const auto unknown = bicoref::apply(rest, train);
    if (!unknown.empty()) throw std::invalid_argument("unknown config key: " + unknown.front());
    const fs::path base = fs::absolute(flags.config_path).parent_path();
    model.word_embeddings = resolve(model.word_embeddings, base);
    model.small_word_embeddings = resolve(model.small_word_embeddings, base);
  }
  if (flags.seed) {
    train.seed = *flags.seed;
    model.init_seed = *flags.seed;
  }
  if (flags.lambda_detection) {
    if (*flags.lambda_detection < 0) throw std::invalid_argument("--lambda-detection must be >= 0");
    train.lambda_detection = *flags.lambda_detection;
  }
  if (flags.no_biaffine) model.biaffine = false;
  if (flags.no_pair_features) model.pair_features = false;
  if (flags.max_steps) train.max_steps = *flags.max_steps;
  if (flags.learning_rate) train.adam.learning_rate = *flags.learning_rate;
  if (flags.eval_every) train.eval_every = *flags.eval_every;
  if (!flags.word_embeddings.empty()) model.word_embeddings = fs::absolute(flags.word_embeddings).string();
  if (!flags.small_word_embeddings.empty())
    model.small_word_embeddings = fs::absolute(flags.small_word_embeddings).string();
  for (const std::string* p : {&model.word_embeddings, &model.small_word_embeddings})
    if (!p->empty()) require_file(*p, "embedding file");
}

std::vector<Document> predict_all(const CorefModel& model, const std::vector<Document>& docs) {
  std::vector<Document> out;
  for (const Document& d : docs) out.push_back(with_predictions(d, predict_document(model, d)));
  return out;
}

int cmd_train(const ModelFlags& flags, const std::string& train_path, const std::string& dev_path,
              const std::string& checkpoint, const std::string& loss_log, const std::string& dev_report,
              std::ostream& out, std::ostream& err) {
  ModelConfig mc;
  TrainConfig tc;
  build_configs(flags, mc, tc);
  require_file(train_path, "training corpus");
  if (!dev_path.empty()) require_file(dev_path, "dev corpus");
  if (checkpoint.empty()) throw UsageError("--checkpoint is required");
  const CorpusSplit train = load_documents(train_path, "train");
  if (train.documents.empty()) throw UsageError("training corpus is empty: " + train_path);
  std::optional<CorpusSplit> dev;
  if (!dev_path.empty()) dev = load_documents(dev_path, "dev");

  auto model = make_model(mc);
  std::ofstream log(loss_log.empty() ? checkpoint + ".loss.csv" : loss_log);
  if (!log) throw std::runtime_error("cannot open loss log for writing");
  write_loss_header(log);
  std::ofstream reports;
  if (!dev_report.empty()) {
    reports.open(dev_report);
    if (!reports) throw std::runtime_error("cannot open dev report for writing: " + dev_report);
  }

  Trainer trainer(*model, tc);
  TrainCallbacks callbacks;
  callbacks.on_step = [&](const StepLog& row) { write_loss_row(log, row); };
  callbacks.on_eval = [&](std::int64_t step) {
    const std::vector<Document>& docs = dev ? dev->documents : train.documents;
    const EvalReport report = conll_average(score_corpus(docs, predict_all(*model, docs)));
    out << "step " << step << " " << (dev ? "dev" : "train") << " CoNLL F1 " << report.average_f1 << std::endl;
    if (reports) {
      auto j = report_json(report);
      j.erase("documents");
      reports << nlohmann::ordered_json{{"step", step}, {"report", j}}.dump() << '\n' << std::flush;
    }
    model->save(checkpoint);
  };
  try {
    trainer.train(train.documents, callbacks);
  } catch (const NonFiniteLossError& e) {
    model->save(checkpoint);
    err << "error: " << e.what() << "; kept the last finite parameters in " << checkpoint << '\n';
    return kExitNonFinite;
  }
  model->save(checkpoint);
  out << "trained " << trainer.steps_taken() << " steps; checkpoint " << checkpoint << '\n';
  return kExitOk;
}

std::unique_ptr<CorefModel> load_for_inference(const std::string& checkpoint, const ModelFlags& flags) {
  require_file(checkpoint, "checkpoint");
  if (flags.word_embeddings.empty() && flags.small_word_embeddings.empty()) return load_model(checkpoint);
  const CheckpointData data = read_checkpoint(checkpoint);
  ModelConfig mc;
  if (!bicoref::apply(parse_key_values(data.metadata), mc).empty())
    throw CheckpointError("checkpoint metadata has unknown keys");
  if (!flags.word_embeddings.empty()) mc.word_embeddings = flags.word_embeddings;
  if (!flags.small_word_embeddings.empty()) mc.small_word_embeddings = flags.small_word_embeddings;
  const FixedEmbeddings fixed = load_fixed_embeddings(mc);
  return load_model(checkpoint, &fixed);
}

int cmd_predict(const ModelFlags& flags, const std::string& checkpoint, const std::string& input,
                const std::string& output, std::ostream& out) {
  require_file(input, "input corpus");
  if (output.empty()) throw UsageError("--out is required");
  const auto model = load_for_inference(checkpoint, flags);
  const CorpusSplit docs = load_documents(input);
  write_documents(output, predict_all(*model, docs.documents));
  out << "wrote " << docs.documents.size() << " documents to " << output << '\n';
  return kExitOk;
}

int cmd_score(const std::string& gold_path, const std::string& sys_path, const std::string& baseline_path,
              std::size_t resamples, std::uint64_t seed, const std::string& json_path, std::ostream& out) {
  require_file(gold_path, "gold corpus");
  require_file(sys_path, "system corpus");
  const CorpusSplit gold = load_documents(gold_path, "gold");
  const CorpusSplit sys = load_documents(sys_path, "system");
  const EvalReport report = conll_average(score_corpus(gold.documents, sys.documents));
  std::optional<BootstrapResult> p;
  if (!baseline_path.empty()) {
    require_file(baseline_path, "bootstrap baseline");
    const CorpusSplit base = load_documents(baseline_path, "baseline");
    const auto b = score_corpus(gold.documents, base.documents);
    p = BootstrapResult{paired_bootstrap(report.documents, b, BootstrapMetric::kMuc, resamples, seed),
                        paired_bootstrap(report.documents, b, BootstrapMetric::kBCubed, resamples, seed),
                        paired_bootstrap(report.documents, b, BootstrapMetric::kCeafPhi4, resamples, seed),
                        paired_bootstrap(report.documents, b, BootstrapMetric::kAverage, resamples, seed)};
  }
  write_report_table(out, report, p);
  if (p) out << (p->average < 0.05 ? "significant at p < 0.05" : "no significant difference at p < 0.05") << '\n';
  if (!json_path.empty()) {
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot open " + json_path);
    js << report_json(report, p).dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, const std::string& fault, double fault_factor, std::ostream& out) {
  ModelConfig mc = gradcheck_config();
  mc.init_seed = seed;
  CorefModel model(mc, gradcheck_embeddings(mc));
  std::optional<testing::ScopedBackwardFault> guard;
  if (!fault.empty()) {
    const Activation a = fault == "relu" ? Activation::kRelu : fault == "tanh" ? Activation::kTanh
                       : fault == "sigmoid" ? Activation::kSigmoid
                                            : throw std::invalid_argument("unknown fault target: " + fault);
    guard.emplace(a, fault_factor);
  }
  GradcheckOptions options;
  const GradcheckReport report = gradcheck(model, gradcheck_fixture(), options);
  write_gradcheck_report(out, report, options.tolerance);
  return report.passed ? kExitOk : kExitFailure;
}

int cmd_report(const ModelFlags& flags, const std::string& checkpoint, const std::string& input,
               const std::string& train_path, const std::string& csv_path, const std::string& json_path,
               std::ostream& out) {
  require_file(input, "input corpus");
  std::vector<Document> training;
  if (!train_path.empty()) {
    require_file(train_path, "training corpus");
    training = load_documents(train_path, "train").documents;
  }
  const auto model = load_for_inference(checkpoint, flags);
  const MentionDetectionReport report = mention_detection_report(*model, load_documents(input).documents, training);
  write_width_csv(out, report);
  out << "detected seen " << report.detected_seen.size() << ", novel " << report.detected_novel.size() << '\n';
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    write_width_csv(csv, report);
  }
  if (!json_path.empty()) {
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot open " + json_path);
    js << mention_report_json(report).dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_synth(std::uint64_t seed, int docs, int vocab, int max_sentences, const std::string& out_dir,
              std::ostream& out) {
  if (out_dir.empty()) throw UsageError("--out is required");
  if (docs <= 0 || vocab <= 0 || max_sentences <= 0) throw UsageError("--docs, --vocab and --max-sentences must be positive");
  fs::create_directories(out_dir);
  const CorpusSplit corpus = generate_synthetic_corpus(seed, docs, vocab, max_sentences);
  const fs::path dir(out_dir);
  write_documents(dir / "train.jsonl", corpus.documents);
  const ModelConfig defaults;
  const auto words = vocabulary(corpus.documents);
  write_embeddings(dir / "word_embeddings.txt", synthetic_embeddings(corpus.documents, defaults.word_dim, seed), words);
  write_embeddings(dir / "small_word_embeddings.txt",
                   synthetic_embeddings(corpus.documents, defaults.small_word_dim, seed + 1), words);
  std::ofstream cfg(dir / "model.cfg");
  cfg << "word_embeddings = word_embeddings.txt\nsmall_word_embeddings = small_word_embeddings.txt\n";
  out << "wrote " << corpus.documents.size() << " documents, vocabulary " << words.size() << ", to " << out_dir << '\n';
  return kExitOk;
}

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool training) {
  cmd->add_option("--config", f.config_path, "key = value config file");
  cmd->add_option("--word-embeddings", f.word_embeddings, "fixed word embedding table");
  cmd->add_option("--small-word-embeddings", f.small_word_embeddings, "second fixed word embedding table");
  if (!training) return;
  cmd->add_option("--seed", f.seed, "initialization, shuffling and dropout seed");
  cmd->add_option("--lambda-detection", f.lambda_detection, "weight of the mention detection loss");
  cmd->add_flag("--no-biaffine", f.no_biaffine, "score antecedents with a pairwise FFNN");
  cmd->add_flag("--no-pair-features", f.no_pair_features, "drop the distance/speaker/genre term");
  cmd->add_option("--max-steps", f.max_steps, "number of updates");
  cmd->add_option("--learning-rate", f.learning_rate, "Adam learning rate");
  cmd->add_option("--eval-every", f.eval_every, "dev evaluation interval in steps");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Span-ranking coreference resolver with biaffine antecedent scoring"};
  app.require_subcommand(1);

  ModelFlags flags;
  std::string train_path, dev_path, checkpoint, loss_log, dev_report, input, output, gold, system, baseline, json,
      fault, csv;
  std::size_t resamples = 10000;
  std::uint64_t seed = 1;
  double fault_factor = 1.5;
  int docs = 20, vocab = 200, max_sentences = 4;

  auto* train = app.add_subcommand("train", "train a model");
  add_model_flags(train, flags, true);
  train->add_option("--train", train_path, "training corpus (JSON lines)");
  train->add_option("--dev", dev_path, "dev corpus evaluated every --eval-every steps");
  train->add_option("--checkpoint", checkpoint, "checkpoint to write");
  train->add_option("--loss-log", loss_log, "CSV loss log (default: <checkpoint>.loss.csv)");
  train->add_option("--out", dev_report, "JSON-lines file of periodic evaluation reports");

  auto* predict = app.add_subcommand("predict", "add predicted_clusters to documents");
  add_model_flags(predict, flags, false);
  predict->add_option("--checkpoint", checkpoint, "trained checkpoint");
  predict->add_option("input", input, "documents (JSON lines)");
  predict->add_option("--out", output, "output JSON lines");

  auto* score = app.add_subcommand("score", "MUC, B3, CEAF_phi4 and CoNLL F1");
  score->add_option("gold", gold, "gold documents");
  score->add_option("system", system, "system documents");
  score->add_option("--bootstrap", baseline, "baseline system for a paired bootstrap test");
  score->add_option("--resamples", resamples, "bootstrap resamples");
  score->add_option("--seed", seed, "bootstrap seed");
  score->add_option("--out", json, "JSON report");

  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference check of every parameter gradient");
  gradcheck_cmd->add_option("--seed", seed, "initialization seed");
  gradcheck_cmd->add_option("--inject-fault", fault, "relu|tanh|sigmoid")->group("");
  gradcheck_cmd->add_option("--fault-factor", fault_factor)->group("");

  auto* report = app.add_subcommand("report", "mention detection accuracy by span width");
  add_model_flags(report, flags, false);
  report->add_option("--checkpoint", checkpoint, "trained checkpoint");
  report->add_option("input", input, "gold documents");
  report->add_option("--train", train_path, "training corpus for the seen/novel split");
  report->add_option("--out", csv, "CSV of width, frequency, accuracy");
  report->add_option("--json", json, "JSON report with mention lists");

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus, embeddings and config");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--docs", docs, "number of documents");
  synth->add_option("--vocab", vocab, "vocabulary budget");
  synth->add_option("--max-sentences", max_sentences, "sentences per document at most");
  synth->add_option("--out", output, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (*train) return cmd_train(flags, train_path, dev_path, checkpoint, loss_log, dev_report, out, err);
    if (*predict) return cmd_predict(flags, checkpoint, input, output, out);
    if (*score) return cmd_score(gold, system, baseline, resamples, seed, json, out);
    if (*gradcheck_cmd) return cmd_gradcheck(seed, fault, fault_factor, out);
    if (*report) return cmd_report(flags, checkpoint, input, train_path, csv, json, out);
    if (*synth) return cmd_synth(seed, docs, vocab, max_sentences, output, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace bicoref
