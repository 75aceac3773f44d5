#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bicoref {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ComputationGraph;
struct Parameter;

// Handle to a node in a ComputationGraph. Cheap to copy; only valid while the
// owning graph is alive.
class Tensor {
 public:
  Tensor() = default;
  Tensor(ComputationGraph* graph, int id) : graph_(graph), id_(id) {}

  const Matrix& value() const;
  const Matrix& grad() const;
  std::vector<std::size_t> shape() const;
  std::size_t rows() const { return static_cast<std::size_t>(value().rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(value().cols()); }
  bool requires_grad() const;
  double scalar() const;

  ComputationGraph* graph() const { return graph_; }
  int id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  ComputationGraph* graph_ = nullptr;
  int id_ = -1;
};

enum class Activation { kSigmoid, kTanh, kRelu };

// Records forward operations and replays them in reverse to accumulate
// gradients. Confined to one thread.
class ComputationGraph {
 public:
  using BackwardRule = std::function<void(ComputationGraph&, int)>;

  struct Node {
    Matrix value;
    Matrix grad;  // allocated lazily during backward
    std::vector<int> inputs;
    BackwardRule backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  explicit ComputationGraph(std::uint64_t dropout_seed = 0) : rng_(dropout_seed) {}
  ComputationGraph(const ComputationGraph&) = delete;
  ComputationGraph& operator=(const ComputationGraph&) = delete;

  Tensor constant(Matrix value);
  // One leaf per parameter per graph; repeated calls return the same node.
  Tensor parameter(Parameter& p);

  // Appends an operation node. Inputs must already exist in this graph.
  Tensor record(Matrix value, std::vector<int> inputs, BackwardRule backward);

  // Reverse sweep from a scalar node. Parameter leaves receive their gradient
  // added into Parameter::grad.
  void backward(Tensor loss);

  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient buffer of an input, zero-initialized on first touch.
  Matrix& grad_of(int id);
  bool needs_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
  std::mt19937_64 rng_;
};

// Operations. Each returns a new node in the graph of its first argument.
Tensor matmul(Tensor a, Tensor b);
Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor cmul(Tensor a, Tensor b);
Tensor scale(Tensor x, double factor);
Tensor add_bias(Tensor x, Tensor bias);            // bias is 1xC, broadcast over rows
Tensor broadcast_rows(Tensor row, std::size_t n);  // 1xC -> nxC
Tensor broadcast_cols(Tensor col, std::size_t n);  // Rx1 -> Rxn
Tensor elementwise(Activation f, Tensor x);
Tensor sigmoid(Tensor x);
Tensor tanh(Tensor x);
Tensor relu(Tensor x);
Tensor transpose(Tensor x);
Tensor sum(Tensor x);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_rows(Tensor x, std::size_t begin, std::size_t count);
Tensor slice_cols(Tensor x, std::size_t begin, std::size_t count);
Tensor gather_rows(Tensor x, std::span<const int> rows);
// Picks x(r, c) for each (r, c) into a Px1 column.
Tensor gather_elements(Tensor x, std::span<const std::pair<int, int>> positions);
// Inverse of gather_elements: places a Px1 column into a zero rows x cols matrix.
Tensor scatter_elements(Tensor values, std::span<const std::pair<int, int>> positions,
                        std::size_t rows, std::size_t cols);
// Column-wise maximum over rows: RxC -> 1xC. Ties route gradient to the first row.
Tensor max_over_rows(Tensor x);
// Row-wise softmax restricted to mask; masked entries are exactly 0.
Tensor masked_softmax(Tensor scores, const Mask& mask);
// Row-wise log-sum-exp over masked entries: RxC -> Rx1.
Tensor masked_logsumexp(Tensor scores, const Mask& mask);
// Inverted dropout. Identity when !training or rate == 0.
Tensor dropout(Tensor x, double rate, bool training);
// Elementwise y log p + (1 - y) log(1 - p) with p = sigmoid(logit) clamped to
// [1e-12, 1 - 1e-12].
Tensor bernoulli_log_likelihood(Tensor logits, const Matrix& labels);

inline Tensor operator+(Tensor a, Tensor b) { return add(a, b); }
inline Tensor operator-(Tensor a, Tensor b) { return sub(a, b); }

namespace testing {

// Scales the backward rule of one activation while alive, so gradient checks
// can demonstrate that they catch a broken rule.
class ScopedBackwardFault {
 public:
  ScopedBackwardFault(Activation target, double factor);
  ~ScopedBackwardFault();
  ScopedBackwardFault(const ScopedBackwardFault&) = delete;
  ScopedBackwardFault& operator=(const ScopedBackwardFault&) = delete;

 private:
  Activation prev_target_;
  double prev_factor_;
};

}  // namespace testing

}  // namespace bicoref
