#include "bicoref/config.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bicoref {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config key '" + key + "': not a number: '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long d = std::stoll(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config key '" + key + "': not an integer: '" + v + "'");
}

std::size_t to_positive(const std::string& key, const std::string& v) {
  const long long d = to_int(key, v);
  if (d <= 0) throw std::invalid_argument("config key '" + key + "' must be positive");
  return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "': not a boolean: '" + v + "'");
}

double to_rate(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (!(d >= 0.0 && d < 1.0)) throw std::invalid_argument("config key '" + key + "' must be in [0, 1)");
  return d;
}

std::string fmt(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::vector<std::string> apply(const KeyValues& kv, ModelConfig& m) {
  std::vector<std::string> unknown;
  for (const auto& [k, v] : kv) {
    if (k == "word_embeddings") m.word_embeddings = v;
    else if (k == "word_dim") m.word_dim = static_cast<std::size_t>(to_int(k, v));
    else if (k == "small_word_embeddings") m.small_word_embeddings = v;
    else if (k == "small_word_dim") m.small_word_dim = static_cast<std::size_t>(to_int(k, v));
    else if (k == "char_dim") m.char_dim = to_positive(k, v);
    else if (k == "char_kernels") m.char_kernels = to_positive(k, v);
    else if (k == "char_windows") {
      m.char_windows.clear();
      std::istringstream in(v);
      std::string w;
      while (std::getline(in, w, ',')) m.char_windows.push_back(static_cast<int>(to_positive(k, trim(w))));
      if (m.char_windows.empty()) throw std::invalid_argument("char_windows is empty");
    } else if (k == "lstm_hidden") m.lstm_hidden = to_positive(k, v);
    else if (k == "ffnn_hidden") m.ffnn_hidden = to_positive(k, v);
    else if (k == "ffnn_layers") m.ffnn_layers = to_positive(k, v);
    else if (k == "feature_dim") m.feature_dim = to_positive(k, v);
    else if (k == "max_span_width") m.max_span_width = static_cast<int>(to_positive(k, v));
    else if (k == "max_antecedents") m.max_antecedents = static_cast<int>(to_positive(k, v));
    else if (k == "prune_ratio") {
      m.prune_ratio = to_double(k, v);
      if (!(m.prune_ratio > 0.0)) throw std::invalid_argument("prune_ratio must be positive");
    } else if (k == "embedding_dropout") m.embedding_dropout = to_rate(k, v);
    else if (k == "hidden_dropout") m.hidden_dropout = to_rate(k, v);
    else if (k == "biaffine") m.biaffine = to_bool(k, v);
    else if (k == "pair_features") m.pair_features = to_bool(k, v);
    else if (k == "init_seed") m.init_seed = static_cast<std::uint64_t>(to_int(k, v));
    else unknown.push_back(k);
  }
  return unknown;
}

std::vector<std::string> apply(const KeyValues& kv, TrainConfig& t) {
  std::vector<std::string> unknown;
  for (const auto& [k, v] : kv) {
    if (k == "lambda_detection") {
      t.lambda_detection = to_double(k, v);
      if (t.lambda_detection < 0.0) throw std::invalid_argument("lambda_detection must be >= 0");
    } else if (k == "learning_rate") t.adam.learning_rate = to_double(k, v);
    else if (k == "adam_beta1") t.adam.beta1 = to_rate(k, v);
    else if (k == "adam_beta2") t.adam.beta2 = to_rate(k, v);
    else if (k == "adam_epsilon") t.adam.epsilon = to_double(k, v);
    else if (k == "max_steps") t.max_steps = static_cast<int>(to_int(k, v));
    else if (k == "seed") t.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "eval_every") t.eval_every = static_cast<int>(to_int(k, v));
    else if (k == "grad_clip") t.grad_clip = to_double(k, v);
    else if (k == "lr_decay_rate") t.lr_decay_rate = to_double(k, v);
    else if (k == "lr_decay_steps") t.lr_decay_steps = static_cast<int>(to_int(k, v));
    else if (k == "shuffle") t.shuffle = to_bool(k, v);
    else unknown.push_back(k);
  }
  return unknown;
}

KeyValues to_key_values(const ModelConfig& m) {
  std::string windows;
  for (std::size_t i = 0; i < m.char_windows.size(); ++i)
    windows += (i ? "," : "") + std::to_string(m.char_windows[i]);
  return {
      {"word_embeddings", m.word_embeddings},
      {"word_dim", std::to_string(m.word_dim)},
      {"small_word_embeddings", m.small_word_embeddings},
      {"small_word_dim", std::to_string(m.small_word_dim)},
      {"char_dim", std::to_string(m.char_dim)},
      {"char_kernels", std::to_string(m.char_kernels)},
      {"char_windows", windows},
      {"lstm_hidden", std::to_string(m.lstm_hidden)},
      {"ffnn_hidden", std::to_string(m.ffnn_hidden)},
      {"ffnn_layers", std::to_string(m.ffnn_layers)},
      {"feature_dim", std::to_string(m.feature_dim)},
      {"max_span_width", std::to_string(m.max_span_width)},
      {"max_antecedents", std::to_string(m.max_antecedents)},
      {"prune_ratio", fmt(m.prune_ratio)},
      {"embedding_dropout", fmt(m.embedding_dropout)},
      {"hidden_dropout", fmt(m.hidden_dropout)},
      {"biaffine", m.biaffine ? "true" : "false"},
      {"pair_features", m.pair_features ? "true" : "false"},
      {"init_seed", std::to_string(m.init_seed)},
  };
}

KeyValues to_key_values(const TrainConfig& t) {
  return {
      {"lambda_detection", fmt(t.lambda_detection)},
      {"learning_rate", fmt(t.adam.learning_rate)},
      {"adam_beta1", fmt(t.adam.beta1)},
      {"adam_beta2", fmt(t.adam.beta2)},
      {"adam_epsilon", fmt(t.adam.epsilon)},
      {"max_steps", std::to_string(t.max_steps)},
      {"seed", std::to_string(t.seed)},
      {"eval_every", std::to_string(t.eval_every)},
      {"grad_clip", fmt(t.grad_clip)},
      {"lr_decay_rate", fmt(t.lr_decay_rate)},
      {"lr_decay_steps", std::to_string(t.lr_decay_steps)},
      {"shuffle", t.shuffle ? "true" : "false"},
  };
}

}  // namespace bicoref
