#include "bicoref/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bicoref/parameters.h"

namespace bicoref {
namespace {

thread_local Activation g_fault_target = Activation::kSigmoid;
thread_local double g_fault_factor = 1.0;

std::string shape_string(const Matrix& m) {
  std::ostringstream os;
  os << "[" << m.rows() << "x" << m.cols() << "]";
  return os.str();
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a) +
                              " vs " + shape_string(b));
}

ComputationGraph& graph_of(Tensor t) {
  if (!t.valid()) throw std::invalid_argument("operation on an empty tensor handle");
  return *t.graph();
}

void same_graph(Tensor a, Tensor b) {
  if (a.graph() != b.graph()) throw std::invalid_argument("tensors belong to different graphs");
}

double activation_value(Activation f, double x) {
  switch (f) {
    case Activation::kSigmoid:
      return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kRelu:
      return x > 0 ? x : 0.0;
  }
  return 0.0;
}

// Derivative expressed through input x and output y.
double activation_derivative(Activation f, double x, double y) {
  switch (f) {
    case Activation::kSigmoid:
      return y * (1.0 - y);
    case Activation::kTanh:
      return 1.0 - y * y;
    case Activation::kRelu:
      return x > 0 ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

const Matrix& Tensor::value() const { return graph_->node(id_).value; }

const Matrix& Tensor::grad() const { return graph_->node(id_).grad; }

std::vector<std::size_t> Tensor::shape() const {
  const Matrix& v = value();
  return {static_cast<std::size_t>(v.rows()), static_cast<std::size_t>(v.cols())};
}

bool Tensor::requires_grad() const { return graph_->node(id_).requires_grad; }

double Tensor::scalar() const {
  const Matrix& v = value();
  if (v.size() != 1) throw std::invalid_argument("scalar(): tensor is " + shape_string(v));
  return v(0, 0);
}

Tensor ComputationGraph::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Tensor(this, static_cast<int>(nodes_.size() - 1));
}

Tensor ComputationGraph::parameter(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Tensor(this, it->second);
  Node n;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  param_nodes_[&p] = static_cast<int>(nodes_.size() - 1);
  return Tensor(this, static_cast<int>(nodes_.size() - 1));
}

Tensor ComputationGraph::record(Matrix value, std::vector<int> inputs, BackwardRule backward) {
  Node n;
  n.value = std::move(value);
  for (int in : inputs) {
    if (in < 0 || static_cast<std::size_t>(in) >= nodes_.size())
      throw std::logic_error("record(): input is not an earlier node");
    n.requires_grad = n.requires_grad || nodes_[static_cast<std::size_t>(in)].requires_grad;
  }
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Tensor(this, static_cast<int>(nodes_.size() - 1));
}

Matrix& ComputationGraph::grad_of(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void ComputationGraph::backward(Tensor loss) {
  if (loss.graph() != this) throw std::invalid_argument("backward(): loss from another graph");
  const Node& root = node(loss.id());
  if (root.value.size() != 1)
    throw std::invalid_argument("backward(): loss must be scalar, got " + shape_string(root.value));
  for (Node& n : nodes_) n.grad.resize(0, 0);
  grad_of(loss.id())(0, 0) = 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param != nullptr) {
      if (n.param->grad.size() == 0) n.param->grad = Matrix::Zero(n.value.rows(), n.value.cols());
      n.param->grad += n.grad;
    }
  }
}

Tensor matmul(Tensor a, Tensor b) {
  same_graph(a, b);
  ComputationGraph& g = graph_of(a);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  Matrix out = av * bv;
  return g.record(std::move(out), {a.id(), b.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    int ia = n.inputs[0], ib = n.inputs[1];
    if (g.needs_grad(ia)) g.grad_of(ia).noalias() += n.grad * g.node(ib).value.transpose();
    if (g.needs_grad(ib)) g.grad_of(ib).noalias() += g.node(ia).value.transpose() * n.grad;
  });
}

Tensor add(Tensor a, Tensor b) {
  same_graph(a, b);
  ComputationGraph& g = graph_of(a);
  if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols())
    shape_error("add", a.value(), b.value());
  Matrix out = a.value() + b.value();
  return g.record(std::move(out), {a.id(), b.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    for (int in : n.inputs)
      if (g.needs_grad(in)) g.grad_of(in) += n.grad;
  });
}

Tensor sub(Tensor a, Tensor b) {
  same_graph(a, b);
  ComputationGraph& g = graph_of(a);
  if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols())
    shape_error("sub", a.value(), b.value());
  Matrix out = a.value() - b.value();
  return g.record(std::move(out), {a.id(), b.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    if (g.needs_grad(n.inputs[0])) g.grad_of(n.inputs[0]) += n.grad;
    if (g.needs_grad(n.inputs[1])) g.grad_of(n.inputs[1]) -= n.grad;
  });
}

Tensor cmul(Tensor a, Tensor b) {
  same_graph(a, b);
  ComputationGraph& g = graph_of(a);
  if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols())
    shape_error("cmul", a.value(), b.value());
  Matrix out = a.value().cwiseProduct(b.value());
  return g.record(std::move(out), {a.id(), b.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    int ia = n.inputs[0], ib = n.inputs[1];
    if (g.needs_grad(ia)) g.grad_of(ia) += n.grad.cwiseProduct(g.node(ib).value);
    if (g.needs_grad(ib)) g.grad_of(ib) += n.grad.cwiseProduct(g.node(ia).value);
  });
}

Tensor scale(Tensor x, double factor) {
  ComputationGraph& g = graph_of(x);
  Matrix out = x.value() * factor;
  return g.record(std::move(out), {x.id()}, [factor](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    g.grad_of(n.inputs[0]) += n.grad * factor;
  });
}

Tensor add_bias(Tensor x, Tensor bias) {
  same_graph(x, bias);
  ComputationGraph& g = graph_of(x);
  const Matrix& xv = x.value();
  const Matrix& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != xv.cols()) shape_error("add_bias", xv, bv);
  Matrix out = xv.rowwise() + bv.row(0);
  return g.record(std::move(out), {x.id(), bias.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    if (g.needs_grad(n.inputs[0])) g.grad_of(n.inputs[0]) += n.grad;
    if (g.needs_grad(n.inputs[1])) g.grad_of(n.inputs[1]) += n.grad.colwise().sum();
  });
}

Tensor broadcast_rows(Tensor row, std::size_t n_rows) {
  ComputationGraph& g = graph_of(row);
  const Matrix& rv = row.value();
  if (rv.rows() != 1) throw std::invalid_argument("broadcast_rows: expects 1xC, got " + shape_string(rv));
  Matrix out = rv.replicate(static_cast<Eigen::Index>(n_rows), 1);
  return g.record(std::move(out), {row.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    g.grad_of(n.inputs[0]) += n.grad.colwise().sum();
  });
}

Tensor broadcast_cols(Tensor col, std::size_t n_cols) {
  ComputationGraph& g = graph_of(col);
  const Matrix& cv = col.value();
  if (cv.cols() != 1) throw std::invalid_argument("broadcast_cols: expects Rx1, got " + shape_string(cv));
  Matrix out = cv.replicate(1, static_cast<Eigen::Index>(n_cols));
  return g.record(std::move(out), {col.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    g.grad_of(n.inputs[0]) += n.grad.rowwise().sum();
  });
}

Tensor elementwise(Activation f, Tensor x) {
  ComputationGraph& g = graph_of(x);
  Matrix out = x.value().unaryExpr([f](double v) { return activation_value(f, v); });
  return g.record(std::move(out), {x.id()}, [f](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    const Matrix& in = g.node(n.inputs[0]).value;
    Matrix& dx = g.grad_of(n.inputs[0]);
    const double fault = (f == g_fault_target) ? g_fault_factor : 1.0;
    for (Eigen::Index i = 0; i < in.size(); ++i)
      dx.data()[i] += fault * n.grad.data()[i] *
                      activation_derivative(f, in.data()[i], n.value.data()[i]);
  });
}

Tensor sigmoid(Tensor x) { return elementwise(Activation::kSigmoid, x); }
Tensor tanh(Tensor x) { return elementwise(Activation::kTanh, x); }
Tensor relu(Tensor x) { return elementwise(Activation::kRelu, x); }

Tensor transpose(Tensor x) {
  ComputationGraph& g = graph_of(x);
  Matrix out = x.value().transpose();
  return g.record(std::move(out), {x.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    g.grad_of(n.inputs[0]) += n.grad.transpose();
  });
}

Tensor sum(Tensor x) {
  ComputationGraph& g = graph_of(x);
  Matrix out(1, 1);
  out(0, 0) = x.value().sum();
  return g.record(std::move(out), {x.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    g.grad_of(n.inputs[0]).array() += n.grad(0, 0);
  });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  ComputationGraph& g = graph_of(parts[0]);
  const Eigen::Index rows = parts[0].value().rows();
  Eigen::Index cols = 0;
  std::vector<int> ids;
  for (const Tensor& p : parts) {
    same_graph(parts[0], p);
    if (p.value().rows() != rows) shape_error("concat_cols", parts[0].value(), p.value());
    cols += p.value().cols();
    ids.push_back(p.id());
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Tensor& p : parts) {
    out.middleCols(at, p.value().cols()) = p.value();
    at += p.value().cols();
  }
  return g.record(std::move(out), std::move(ids), [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    Eigen::Index off = 0;
    for (int in : n.inputs) {
      const Eigen::Index w = g.node(in).value.cols();
      if (g.needs_grad(in)) g.grad_of(in) += n.grad.middleCols(off, w);
      off += w;
    }
  });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
  ComputationGraph& g = graph_of(parts[0]);
  const Eigen::Index cols = parts[0].value().cols();
  Eigen::Index rows = 0;
  std::vector<int> ids;
  for (const Tensor& p : parts) {
    same_graph(parts[0], p);
    if (p.value().cols() != cols) shape_error("concat_rows", parts[0].value(), p.value());
    rows += p.value().rows();
    ids.push_back(p.id());
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Tensor& p : parts) {
    out.middleRows(at, p.value().rows()) = p.value();
    at += p.value().rows();
  }
  return g.record(std::move(out), std::move(ids), [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    Eigen::Index off = 0;
    for (int in : n.inputs) {
      const Eigen::Index h = g.node(in).value.rows();
      if (g.needs_grad(in)) g.grad_of(in) += n.grad.middleRows(off, h);
      off += h;
    }
  });
}

Tensor slice_rows(Tensor x, std::size_t begin, std::size_t count) {
  ComputationGraph& g = graph_of(x);
  const Matrix& xv = x.value();
  if (begin + count > static_cast<std::size_t>(xv.rows()))
    throw std::out_of_range("slice_rows: range exceeds " + shape_string(xv));
  const auto b = static_cast<Eigen::Index>(begin);
  const auto c = static_cast<Eigen::Index>(count);
  Matrix out = xv.middleRows(b, c);
  return g.record(std::move(out), {x.id()}, [b, c](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    g.grad_of(n.inputs[0]).middleRows(b, c) += n.grad;
  });
}

Tensor slice_cols(Tensor x, std::size_t begin, std::size_t count) {
  ComputationGraph& g = graph_of(x);
  const Matrix& xv = x.value();
  if (begin + count > static_cast<std::size_t>(xv.cols()))
    throw std::out_of_range("slice_cols: range exceeds " + shape_string(xv));
  const auto b = static_cast<Eigen::Index>(begin);
  const auto c = static_cast<Eigen::Index>(count);
  Matrix out = xv.middleCols(b, c);
  return g.record(std::move(out), {x.id()}, [b, c](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    g.grad_of(n.inputs[0]).middleCols(b, c) += n.grad;
  });
}

Tensor gather_rows(Tensor x, std::span<const int> rows) {
  ComputationGraph& g = graph_of(x);
  const Matrix& xv = x.value();
  Matrix out(static_cast<Eigen::Index>(rows.size()), xv.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= xv.rows())
      throw std::out_of_range("gather_rows: row " + std::to_string(rows[r]) + " outside " +
                              shape_string(xv));
    out.row(static_cast<Eigen::Index>(r)) = xv.row(rows[r]);
  }
  std::vector<int> idx(rows.begin(), rows.end());
  return g.record(std::move(out), {x.id()}, [idx = std::move(idx)](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    Matrix& dx = g.grad_of(n.inputs[0]);
    for (std::size_t r = 0; r < idx.size(); ++r) dx.row(idx[r]) += n.grad.row(static_cast<Eigen::Index>(r));
  });
}

Tensor gather_elements(Tensor x, std::span<const std::pair<int, int>> positions) {
  ComputationGraph& g = graph_of(x);
  const Matrix& xv = x.value();
  Matrix out(static_cast<Eigen::Index>(positions.size()), 1);
  for (std::size_t p = 0; p < positions.size(); ++p) {
    auto [r, c] = positions[p];
    if (r < 0 || r >= xv.rows() || c < 0 || c >= xv.cols())
      throw std::out_of_range("gather_elements: position outside " + shape_string(xv));
    out(static_cast<Eigen::Index>(p), 0) = xv(r, c);
  }
  std::vector<std::pair<int, int>> pos(positions.begin(), positions.end());
  return g.record(std::move(out), {x.id()}, [pos = std::move(pos)](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    Matrix& dx = g.grad_of(n.inputs[0]);
    for (std::size_t p = 0; p < pos.size(); ++p)
      dx(pos[p].first, pos[p].second) += n.grad(static_cast<Eigen::Index>(p), 0);
  });
}

Tensor scatter_elements(Tensor values, std::span<const std::pair<int, int>> positions,
                        std::size_t rows, std::size_t cols) {
  ComputationGraph& g = graph_of(values);
  const Matrix& vv = values.value();
  if (vv.cols() != 1 || static_cast<std::size_t>(vv.rows()) != positions.size())
    throw std::invalid_argument("scatter_elements: expects a Px1 column matching positions, got " +
                                shape_string(vv));
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t p = 0; p < positions.size(); ++p) {
    auto [r, c] = positions[p];
    if (r < 0 || static_cast<std::size_t>(r) >= rows || c < 0 || static_cast<std::size_t>(c) >= cols)
      throw std::out_of_range("scatter_elements: position outside target");
    out(r, c) += vv(static_cast<Eigen::Index>(p), 0);
  }
  std::vector<std::pair<int, int>> pos(positions.begin(), positions.end());
  return g.record(std::move(out), {values.id()}, [pos = std::move(pos)](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    Matrix& dv = g.grad_of(n.inputs[0]);
    for (std::size_t p = 0; p < pos.size(); ++p)
      dv(static_cast<Eigen::Index>(p), 0) += n.grad(pos[p].first, pos[p].second);
  });
}

Tensor max_over_rows(Tensor x) {
  ComputationGraph& g = graph_of(x);
  const Matrix& xv = x.value();
  if (xv.rows() == 0) throw std::invalid_argument("max_over_rows: empty input");
  Matrix out(1, xv.cols());
  std::vector<Eigen::Index> arg(static_cast<std::size_t>(xv.cols()));
  for (Eigen::Index c = 0; c < xv.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < xv.rows(); ++r)
      if (xv(r, c) > xv(best, c)) best = r;
    arg[static_cast<std::size_t>(c)] = best;
    out(0, c) = xv(best, c);
  }
  return g.record(std::move(out), {x.id()}, [arg = std::move(arg)](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    Matrix& dx = g.grad_of(n.inputs[0]);
    for (std::size_t c = 0; c < arg.size(); ++c)
      dx(arg[c], static_cast<Eigen::Index>(c)) += n.grad(0, static_cast<Eigen::Index>(c));
  });
}

namespace {

// Non-finite entries make the result NaN rather than looking like an empty row.
double masked_row_max(const Matrix& sv, const Mask& mask, Eigen::Index r, const char* op) {
  double mx = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index c = 0; c < sv.cols(); ++c) {
    if (!mask(r, c)) continue;
    any = true;
    if (std::isnan(sv(r, c))) return sv(r, c);
    mx = std::max(mx, sv(r, c));
  }
  if (!any) throw std::invalid_argument(std::string(op) + ": row " + std::to_string(r) + " has no unmasked entry");
  return std::isfinite(mx) ? mx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Tensor masked_softmax(Tensor scores, const Mask& mask) {
  ComputationGraph& g = graph_of(scores);
  const Matrix& sv = scores.value();
  if (mask.rows() != sv.rows() || mask.cols() != sv.cols())
    throw std::invalid_argument("masked_softmax: mask shape differs from " + shape_string(sv));
  Matrix out = Matrix::Zero(sv.rows(), sv.cols());
  for (Eigen::Index r = 0; r < sv.rows(); ++r) {
    const double mx = masked_row_max(sv, mask, r, "masked_softmax");
    double z = 0.0;
    for (Eigen::Index c = 0; c < sv.cols(); ++c)
      if (mask(r, c)) z += (out(r, c) = std::exp(sv(r, c) - mx));
    out.row(r) /= z;
  }
  return g.record(std::move(out), {scores.id()}, [](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    const Matrix& p = n.value;
    // d s_c = p_c (g_c - sum_k p_k g_k); masked entries have p = 0.
    Eigen::VectorXd inner = p.cwiseProduct(n.grad).rowwise().sum();
    Matrix& ds = g.grad_of(n.inputs[0]);
    ds += p.cwiseProduct(n.grad - inner.replicate(1, p.cols()));
  });
}

Tensor masked_logsumexp(Tensor scores, const Mask& mask) {
  ComputationGraph& g = graph_of(scores);
  const Matrix& sv = scores.value();
  if (mask.rows() != sv.rows() || mask.cols() != sv.cols())
    throw std::invalid_argument("masked_logsumexp: mask shape differs from " + shape_string(sv));
  Matrix out(sv.rows(), 1);
  Matrix weights = Matrix::Zero(sv.rows(), sv.cols());
  for (Eigen::Index r = 0; r < sv.rows(); ++r) {
    const double mx = masked_row_max(sv, mask, r, "masked_logsumexp");
    double z = 0.0;
    for (Eigen::Index c = 0; c < sv.cols(); ++c)
      if (mask(r, c)) z += (weights(r, c) = std::exp(sv(r, c) - mx));
    weights.row(r) /= z;
    out(r, 0) = mx + std::log(z);
  }
  return g.record(std::move(out), {scores.id()},
                  [weights = std::move(weights)](ComputationGraph& g, int self) {
                    const auto& n = g.node(self);
                    g.grad_of(n.inputs[0]) += weights.cwiseProduct(n.grad.replicate(1, weights.cols()));
                  });
}

Tensor dropout(Tensor x, double rate, bool training) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw std::invalid_argument("dropout: rate must be in [0, 1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return x;
  ComputationGraph& g = graph_of(x);
  const Matrix& xv = x.value();
  std::bernoulli_distribution keep(1.0 - rate);
  const double survivor_scale = 1.0 / (1.0 - rate);
  Matrix mask(xv.rows(), xv.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(g.rng()) ? survivor_scale : 0.0;
  Matrix out = xv.cwiseProduct(mask);
  return g.record(std::move(out), {x.id()}, [mask = std::move(mask)](ComputationGraph& g, int self) {
    const auto& n = g.node(self);
    g.grad_of(n.inputs[0]) += n.grad.cwiseProduct(mask);
  });
}

Tensor bernoulli_log_likelihood(Tensor logits, const Matrix& labels) {
  ComputationGraph& g = graph_of(logits);
  const Matrix& lv = logits.value();
  if (labels.rows() != lv.rows() || labels.cols() != lv.cols())
    shape_error("bernoulli_log_likelihood", lv, labels);
  constexpr double kClamp = 1e-12;
  Matrix out(lv.rows(), lv.cols());
  Matrix dlogit(lv.rows(), lv.cols());
  for (Eigen::Index i = 0; i < lv.size(); ++i) {
    const double raw = activation_value(Activation::kSigmoid, lv.data()[i]);
    const double p = std::clamp(raw, kClamp, 1.0 - kClamp);
    const double y = labels.data()[i];
    out.data()[i] = y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    // Clamped region is flat.
    dlogit.data()[i] = (raw == p) ? (y - p) : 0.0;
  }
  return g.record(std::move(out), {logits.id()},
                  [dlogit = std::move(dlogit)](ComputationGraph& g, int self) {
                    const auto& n = g.node(self);
                    g.grad_of(n.inputs[0]) += n.grad.cwiseProduct(dlogit);
                  });
}

namespace testing {

ScopedBackwardFault::ScopedBackwardFault(Activation target, double factor)
    : prev_target_(g_fault_target), prev_factor_(g_fault_factor) {
  g_fault_target = target;
  g_fault_factor = factor;
}

ScopedBackwardFault::~ScopedBackwardFault() {
  g_fault_target = prev_target_;
  g_fault_factor = prev_factor_;
}

}  // namespace testing

}  // namespace bicoref
